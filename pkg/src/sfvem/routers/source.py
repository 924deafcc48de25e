"""
Source router for the sfvem gateway.

Solves the manufactured source problem on one mesh and reports its errors.
"""

from fastapi import APIRouter, Depends

from ..assembly import assemble, assemble_source_rhs, compute_projections
from ..dependencies import get_source_request, library_errors
from ..eigensolve import solve_linear
from ..log import get_component_logger
from ..mesh import generate_mesh
from ..models.requests import SourceRequest
from ..models.responses import ERROR_RESPONSES, SourceResponse
from ..study.cases import manufactured_problem
from ..study.convergence import compute_error_norms

logger = get_component_logger("sfvem.api.source")

router = APIRouter(prefix="/source", tags=["Source"])


@router.get(
    "/{family}/{n}", response_model=SourceResponse, responses=ERROR_RESPONSES
)
def get_source_errors(
    request: SourceRequest = Depends(get_source_request),
) -> SourceResponse:
    """
    L2 and energy errors of the manufactured problem u = sin(pi x) sin(pi y).
    """
    logger.info(
        "Source solve requested",
        family=request.family.value,
        n=request.n,
        k=request.k,
        base_case=request.base_case.value,
    )
    with library_errors("source"):
        problem = manufactured_problem(request.base_case)
        spec = problem.base.problem_spec(request.k, request.scheme)
        mesh = generate_mesh(request.mesh_family, request.n)
        projections = compute_projections(mesh, spec)
        pair, dofmap = assemble(mesh, spec, projections)
        rhs = assemble_source_rhs(dofmap, projections, problem.f)
        solution = dofmap.expand(solve_linear(pair.A, rhs))
        l2, energy = compute_error_norms(
            solution, problem.u, problem.grad, dofmap, projections, spec
        )

    return SourceResponse(
        family=request.family,
        n=request.n,
        k=request.k,
        base_case=request.base_case,
        scheme=request.scheme,
        ndof=pair.size,
        l2_error=l2,
        energy_error=energy,
    )

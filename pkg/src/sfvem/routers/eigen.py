"""
Eigen router for the sfvem gateway.

Solves the discrete eigenproblem of one coefficient case on one mesh and
compares the smallest eigenvalues with the closed-form spectrum.
"""

from fastapi import APIRouter, Depends

from ..assembly import assemble
from ..dependencies import get_eigen_request, library_errors
from ..eigensolve import solve_gevp
from ..log import get_component_logger
from ..mesh import generate_mesh
from ..models.requests import EigenRequest
from ..models.responses import ERROR_RESPONSES, EigenResponse, EigenvalueEntry
from ..study.cases import exact_reference, expand_reference, get_case

logger = get_component_logger("sfvem.api.eigen")

router = APIRouter(prefix="/eigen", tags=["Eigen"])


@router.get(
    "/{case}/{family}/{n}", response_model=EigenResponse, responses=ERROR_RESPONSES
)
def get_eigenvalues(
    request: EigenRequest = Depends(get_eigen_request),
) -> EigenResponse:
    """
    Smallest-modulus eigenvalues of the discrete problem.

    Args:
        request: case, family, n, k, optional ell, scheme, nev and delta

    Returns:
        EigenResponse with eigenvalues, residuals and errors against the
        exact spectrum
    """
    logger.info(
        "Eigenvalues requested",
        case=request.case.value,
        family=request.family.value,
        n=request.n,
        k=request.k,
        scheme=request.scheme.value,
    )
    with library_errors("eigen"):
        spec = get_case(request.case).problem_spec(
            request.k, request.scheme, request.ell
        )
        mesh = generate_mesh(request.mesh_family, request.n)
        pair, _ = assemble(mesh, spec)
        nev = min(request.nev, pair.size)
        result = solve_gevp(pair, nev)
        reference = expand_reference(exact_reference(request.case, nev))
        exact = [group.value for _, group in reference]

    entries = []
    for j, value in enumerate(result.eigenvalues):
        entries.append(
            EigenvalueEntry(
                index=j + 1,
                re=float(value.real),
                im=float(value.imag),
                residual=float(result.residuals[j]),
                exact=exact[j],
                abs_error=abs(complex(value) - exact[j]),
            )
        )
    return EigenResponse(
        case=request.case,
        family=request.family,
        n=request.n,
        k=request.k,
        scheme=request.scheme,
        ndof=pair.size,
        strategy=result.strategy,
        eigenvalues=entries,
        message=None if nev == request.nev else f"only {nev} free DOFs",
    )

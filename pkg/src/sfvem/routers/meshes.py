"""
Meshes router for the sfvem gateway.

Generates a mesh of one family and reports its counts and shape regularity.
"""

from fastapi import APIRouter, Depends

from ..dependencies import get_mesh_request, library_errors
from ..log import get_component_logger
from ..mesh import generate_mesh, mesh_size, validate_mesh
from ..models.requests import MeshRequest
from ..models.responses import ERROR_RESPONSES, MeshResponse

logger = get_component_logger("sfvem.api.meshes")

router = APIRouter(prefix="/meshes", tags=["Meshes"])


@router.get("/{family}/{n}", response_model=MeshResponse, responses=ERROR_RESPONSES)
def get_mesh(request: MeshRequest = Depends(get_mesh_request)) -> MeshResponse:
    """
    Generate and validate a mesh of the unit square.

    Args:
        request: family, n, optional delta and c_t

    Returns:
        MeshResponse with vertex, cell and edge counts, h and the
        validation report
    """
    logger.info("Mesh requested", family=request.family.value, n=request.n)
    family = request.mesh_family
    with library_errors("mesh"):
        mesh = generate_mesh(family, request.n)
        report = validate_mesh(mesh, request.c_t)

    return MeshResponse(
        family=request.family,
        n=request.n,
        delta=family.shape_delta,
        vertices=mesh.n_vertices,
        cells=mesh.n_cells,
        edges=mesh.n_edges,
        h=mesh_size(mesh),
        validation=report,
    )

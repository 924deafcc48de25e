"""
sfvem - stabilization-free virtual elements for 2D elliptic eigenvalue and
source problems on polygonal meshes.

Usage:
    # Library
    from sfvem import ProblemSpec, assemble, generate_mesh, solve_gevp

    # Command line
    sfvem convergence --config study.json

    # HTTP gateway
    python -m sfvem.standalone_server
"""

from fastapi import APIRouter

from .assembly import (
    GlobalDofMap,
    ProblemSpec,
    Scheme,
    SparsePair,
    assemble,
    assemble_source_rhs,
    compute_projections,
    export_pair,
    interpolate,
    local_forms,
)
from .eigensolve import (
    EigenResult,
    Strategy,
    cluster_eigenvalues,
    solve_adjoint_gevp,
    solve_gevp,
    solve_linear,
)
from .exceptions import SfvemError
from .gateway import SfvemGateway
from .mesh import FamilyTag, MeshFamily, PolygonMesh, generate_mesh, validate_mesh


def get_all_routers() -> list[APIRouter]:
    """
    Get all routers for composition into another FastAPI application.

    Returns:
        List[APIRouter]: meshes, eigen and source routers
    """
    from .routers import eigen_router, meshes_router, source_router

    return [meshes_router, eigen_router, source_router]


__all__ = [
    "EigenResult",
    "FamilyTag",
    "GlobalDofMap",
    "MeshFamily",
    "PolygonMesh",
    "ProblemSpec",
    "Scheme",
    "SfvemError",
    "SfvemGateway",
    "SparsePair",
    "Strategy",
    "assemble",
    "assemble_source_rhs",
    "cluster_eigenvalues",
    "compute_projections",
    "export_pair",
    "generate_mesh",
    "get_all_routers",
    "interpolate",
    "local_forms",
    "solve_adjoint_gevp",
    "solve_gevp",
    "solve_linear",
    "validate_mesh",
]
__version__ = "0.1.0"

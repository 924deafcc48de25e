"""FastAPI dependencies for the sfvem gateway."""

from .problems import (
    get_eigen_request,
    get_mesh_request,
    get_source_request,
    library_errors,
)

__all__ = [
    "get_eigen_request",
    "get_mesh_request",
    "get_source_request",
    "library_errors",
]

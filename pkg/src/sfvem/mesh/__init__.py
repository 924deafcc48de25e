"""Polygonal meshes of the unit square: generation, validation and text I/O."""

from .families import FamilyTag, MeshFamily, generate_mesh
from .geometry import (
    CellGeometry,
    PolygonMesh,
    in_kernel,
    mesh_size,
    reflex_vertices,
    star_radius,
)
from .io import read_mesh, write_mesh
from .validation import ValidationReport, validate_mesh

__all__ = [
    "CellGeometry",
    "FamilyTag",
    "MeshFamily",
    "PolygonMesh",
    "ValidationReport",
    "generate_mesh",
    "in_kernel",
    "mesh_size",
    "read_mesh",
    "reflex_vertices",
    "star_radius",
    "validate_mesh",
    "write_mesh",
]

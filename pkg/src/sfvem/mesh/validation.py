"""Shape-regularity checks: star-shapedness with respect to a ball and edge ratios."""

import numpy as np
import shapely
from pydantic import BaseModel, ConfigDict, Field

from ..log import get_component_logger
from .geometry import PolygonMesh, star_radius

logger = get_component_logger("sfvem.mesh.validation")

AREA_TOL = 1e-14


class ValidationReport(BaseModel):
    """Result of :func:`validate_mesh`."""

    model_config = ConfigDict(validate_assignment=True)

    passed: bool = Field(..., description="Both ratios >= c_T and all cells simple")
    c_t: float = Field(..., gt=0, description="Required ratio")
    min_star_radius_ratio: float = Field(
        ..., description="min over cells of rho_E / h_E"
    )
    min_edge_ratio: float = Field(..., description="min over edges of h_e / h_E")
    max_vertex_count: int = Field(..., ge=0, description="Largest N_E")
    offending_cells: list[int] = Field(default_factory=list)
    non_simple_cells: list[int] = Field(default_factory=list)


def validate_mesh(mesh: PolygonMesh, c_t: float) -> ValidationReport:
    """
    Check every cell against the shape-regularity constant ``c_t``.

    Args:
        mesh: Structurally well-formed mesh
        c_t: Minimum star-radius and edge ratios

    Returns:
        ValidationReport; non-simple or degenerate cells fail the report
    """
    rings = [shapely.LinearRing(mesh.vertices[cell]) for cell in mesh.cells]
    simple = shapely.is_simple(rings)

    star_ratios = np.empty(mesh.n_cells)
    edge_ratios = np.empty(mesh.n_cells)
    non_simple = []
    for c, cell in enumerate(mesh.cells):
        poly = mesh.vertices[cell]
        h = mesh.diameters[c]
        if not simple[c] or mesh.areas[c] <= AREA_TOL * h**2:
            non_simple.append(c)
        radius, _ = star_radius(poly)
        star_ratios[c] = radius / h
        lengths = np.hypot(*(np.roll(poly, -1, axis=0) - poly).T)
        edge_ratios[c] = lengths.min() / h

    bad = (star_ratios < c_t) | (edge_ratios < c_t)
    bad[non_simple] = True
    offending = [int(c) for c in np.flatnonzero(bad)]
    report = ValidationReport(
        passed=not offending,
        c_t=c_t,
        min_star_radius_ratio=float(star_ratios.min()),
        min_edge_ratio=float(edge_ratios.min()),
        max_vertex_count=max(len(cell) for cell in mesh.cells),
        offending_cells=offending,
        non_simple_cells=non_simple,
    )
    logger.info(
        "Mesh validated",
        passed=report.passed,
        c_t=c_t,
        min_star_radius_ratio=report.min_star_radius_ratio,
        min_edge_ratio=report.min_edge_ratio,
        offending=len(offending),
    )
    return report

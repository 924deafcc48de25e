"""
Quadrature on polygonal cells and edges.

Cells are split into a fan of triangles from their star-point. Each triangle
gets a collapsed (Duffy) tensor rule: Gauss-Jacobi with weight (1 - s) in the
collapsed direction and Gauss-Legendre in the other, which is exact for any
requested degree with strictly positive weights. Edges use Gauss-Legendre.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray
from scipy.special import roots_jacobi

from .exceptions import QuadratureError
from .log import get_component_logger
from .mesh.geometry import CellGeometry, in_kernel

logger = get_component_logger("sfvem.quadrature")

FloatArray = NDArray[np.float64]

MAX_EXACTNESS = 60


@dataclass(frozen=True)
class CellRule:
    """Points inside a cell and positive weights summing to its area."""

    points: FloatArray
    weights: FloatArray
    exactness: int

    def integrate(self, values: FloatArray) -> FloatArray:
        """Integrate tabulated values (first axis = points)."""
        return np.tensordot(self.weights, values, axes=(0, 0))


@dataclass(frozen=True)
class EdgeRule:
    """
    Points on an edge and weights summing to its length.

    ``params`` are the edge parameters t in (-1/2, 1/2) of the points,
    measured from ``start``.
    """

    points: FloatArray
    weights: FloatArray
    params: FloatArray
    exactness: int


def _check_exactness(exactness: int) -> None:
    if exactness < 0:
        raise QuadratureError(f"exactness must be >= 0, got {exactness}")
    if exactness > MAX_EXACTNESS:
        raise QuadratureError(
            f"exactness {exactness} exceeds the supported maximum {MAX_EXACTNESS}"
        )


@lru_cache(maxsize=64)
def gauss_legendre(exactness: int) -> tuple[FloatArray, FloatArray]:
    """Gauss-Legendre nodes in (-1/2, 1/2) and weights summing to 1."""
    _check_exactness(exactness)
    n = max(1, (exactness + 2) // 2)
    nodes, weights = np.polynomial.legendre.leggauss(n)
    return 0.5 * nodes, 0.5 * weights


@lru_cache(maxsize=64)
def reference_triangle_rule(exactness: int) -> tuple[FloatArray, FloatArray]:
    """
    Collapsed rule on the triangle (0,0), (1,0), (0,1).

    Returns:
        (points (n*n, 2), weights summing to 1/2)
    """
    _check_exactness(exactness)
    n = max(1, (exactness + 2) // 2)
    jac_nodes, jac_weights = roots_jacobi(n, 1.0, 0.0)
    leg_nodes, leg_weights = np.polynomial.legendre.leggauss(n)
    s = 0.5 * (1.0 + jac_nodes)
    t = 0.5 * (1.0 + leg_nodes)
    ws = 0.25 * jac_weights
    wt = 0.5 * leg_weights
    ss, tt = np.meshgrid(s, t, indexing="ij")
    points = np.stack([ss.ravel(), ((1.0 - ss) * tt).ravel()], axis=1)
    weights = np.outer(ws, wt).ravel()
    return points, weights


def triangulate_cell(cell: CellGeometry) -> list[FloatArray]:
    """
    Fan triangulation from the star-point.

    Returns:
        N_E triangles as (3, 2) arrays (star-point, v_i, v_{i+1})

    Raises:
        QuadratureError: star-point outside the kernel
    """
    if not in_kernel(cell.vertices, cell.star_point):
        logger.warning(
            "Star-point outside kernel",
            cell=cell.index,
            star_point=cell.star_point.tolist(),
        )
        raise QuadratureError(f"cell {cell.index}: star-point is outside the kernel")
    nxt = np.roll(cell.vertices, -1, axis=0)
    return [
        np.array([cell.star_point, a, b])
        for a, b in zip(cell.vertices, nxt, strict=True)
    ]


def build_cell_rule(cell: CellGeometry, exactness: int) -> CellRule:
    """Composite fan rule exact for polynomials of degree <= ``exactness``."""
    ref_points, ref_weights = reference_triangle_rule(exactness)
    points, weights = [], []
    for tri in triangulate_cell(cell):
        e1, e2 = tri[1] - tri[0], tri[2] - tri[0]
        jacobian = e1[0] * e2[1] - e1[1] * e2[0]
        points.append(tri[0] + ref_points @ np.array([e1, e2]))
        weights.append(ref_weights * jacobian)
    return CellRule(
        points=np.concatenate(points),
        weights=np.concatenate(weights),
        exactness=exactness,
    )


def build_edge_rule(start: FloatArray, end: FloatArray, exactness: int) -> EdgeRule:
    """Gauss-Legendre rule with ceil((exactness+1)/2) points on [start, end]."""
    t, w = gauss_legendre(exactness)
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    direction = end - start
    length = float(np.hypot(*direction))
    return EdgeRule(
        points=0.5 * (start + end) + t[:, None] * direction,
        weights=w * length,
        params=t,
        exactness=exactness,
    )


def default_cell_exactness(k: int, ell: int) -> int:
    return 2 * (k + ell) + 2


def default_edge_exactness(k: int, ell: int) -> int:
    return 2 * k + ell + 2

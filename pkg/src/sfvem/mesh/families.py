"""
Mesh families on the unit square.

All three start from an n x n grid of squares of width w = 1/n:

- quad: the squares themselves;
- pentagon: each square is cut by a polyline from its bottom midpoint through
  the centre shifted right by delta*w to its top midpoint, giving one convex
  and one concave pentagon;
- octagon: each square keeps its corners and edge midpoints; every interior
  midpoint is pushed by delta*w into one neighbour by a parity rule, so each
  cell of a mesh with n >= 2 has at least one reflex vertex.
"""

from enum import Enum

import numpy as np
import shapely
from pydantic import BaseModel, ConfigDict, Field

from ..exceptions import MeshGenerationError
from ..log import get_component_logger
from .geometry import KERNEL_MARGIN, PolygonMesh, in_kernel

logger = get_component_logger("sfvem.mesh")

DEDUP_TOL = 1e-12


class FamilyTag(str, Enum):
    """Mesh family identifiers."""

    QUAD = "quad"
    PENTAGON = "pentagon"
    OCTAGON = "octagon"

    @classmethod
    def _missing_(cls, value: object) -> "FamilyTag | None":
        aliases = {"t1": cls.QUAD, "t2": cls.PENTAGON, "t3": cls.OCTAGON}
        if isinstance(value, str):
            return aliases.get(value.lower()) or cls.__members__.get(value.upper())
        return None


DEFAULT_DELTA = {FamilyTag.QUAD: 0.0, FamilyTag.PENTAGON: 0.1, FamilyTag.OCTAGON: 0.15}


class MeshFamily(BaseModel):
    """A mesh family and its shape parameter."""

    model_config = ConfigDict(frozen=True)

    tag: FamilyTag = Field(..., description="quad (T1), pentagon (T2) or octagon (T3)")
    delta: float | None = Field(
        default=None,
        ge=0.0,
        le=0.25,
        description="Displacement as a fraction of the grid width",
    )

    @property
    def shape_delta(self) -> float:
        return DEFAULT_DELTA[self.tag] if self.delta is None else self.delta


class _VertexPool:
    """Insertion-ordered vertex list with coordinate deduplication."""

    def __init__(self, tol: float = DEDUP_TOL) -> None:
        self.tol = tol
        self._index: dict[tuple[int, int], int] = {}
        self._coords: list[tuple[float, float]] = []

    def add(self, x: float, y: float) -> int:
        key = (round(x / self.tol), round(y / self.tol))
        index = self._index.get(key)
        if index is None:
            index = self._index[key] = len(self._coords)
            self._coords.append((x, y))
        return index

    def array(self) -> np.ndarray:
        return np.array(self._coords, dtype=float).reshape(-1, 2)


def _quad_cells(pool: _VertexPool, n: int, delta: float) -> list[list[int]]:
    cells = []
    for j in range(n):
        for i in range(n):
            cells.append(
                [
                    pool.add(i / n, j / n),
                    pool.add((i + 1) / n, j / n),
                    pool.add((i + 1) / n, (j + 1) / n),
                    pool.add(i / n, (j + 1) / n),
                ]
            )
    return cells


def _pentagon_cells(pool: _VertexPool, n: int, delta: float) -> list[list[int]]:
    cells = []
    for j in range(n):
        for i in range(n):
            a = pool.add(i / n, j / n)
            b = pool.add((i + 1) / n, j / n)
            c = pool.add((i + 1) / n, (j + 1) / n)
            d = pool.add(i / n, (j + 1) / n)
            mid_bottom = pool.add((i + 0.5) / n, j / n)
            mid_top = pool.add((i + 0.5) / n, (j + 1) / n)
            p = pool.add((i + 0.5 + delta) / n, (j + 0.5) / n)
            cells.append([a, mid_bottom, p, mid_top, d])
            cells.append([mid_bottom, b, c, mid_top, p])
    return cells


def _octagon_cells(pool: _VertexPool, n: int, delta: float) -> list[list[int]]:
    def horizontal_mid(i: int, j: int) -> int:
        # edge on the line y = j/n between cells (i, j-1) and (i, j)
        shift = 0.0
        if 0 < j < n:
            shift = delta if (i + j) % 2 == 1 else -delta
        return pool.add((i + 0.5) / n, (j + shift) / n)

    def vertical_mid(i: int, j: int) -> int:
        # edge on the line x = i/n between cells (i-1, j) and (i, j)
        shift = 0.0
        if 0 < i < n:
            shift = delta if (i + j) % 2 == 0 else -delta
        return pool.add((i + shift) / n, (j + 0.5) / n)

    cells = []
    for j in range(n):
        for i in range(n):
            cells.append(
                [
                    pool.add(i / n, j / n),
                    horizontal_mid(i, j),
                    pool.add((i + 1) / n, j / n),
                    vertical_mid(i + 1, j),
                    pool.add((i + 1) / n, (j + 1) / n),
                    horizontal_mid(i, j + 1),
                    pool.add(i / n, (j + 1) / n),
                    vertical_mid(i, j),
                ]
            )
    return cells


_BUILDERS = {
    FamilyTag.QUAD: _quad_cells,
    FamilyTag.PENTAGON: _pentagon_cells,
    FamilyTag.OCTAGON: _octagon_cells,
}


def generate_mesh(family: MeshFamily, n: int) -> PolygonMesh:
    """
    Generate a mesh of the unit square.

    Args:
        family: Mesh family and shape parameter
        n: Grid subdivisions per side (>= 1)

    Returns:
        PolygonMesh with simple, star-shaped cells

    Raises:
        MeshGenerationError: n < 1, or a cell that is not simple or not
            star-shaped with respect to its star-point
    """
    if n < 1:
        raise MeshGenerationError(f"n must be >= 1, got {n}")

    delta = family.shape_delta
    pool = _VertexPool()
    cells = _BUILDERS[family.tag](pool, n, delta)
    mesh = PolygonMesh.from_cells(pool.array(), cells)
    _check_cells(mesh)

    logger.info(
        "Mesh generated",
        family=family.tag.value,
        n=n,
        delta=delta,
        vertices=mesh.n_vertices,
        cells=mesh.n_cells,
        edges=mesh.n_edges,
    )
    return mesh


def _check_cells(mesh: PolygonMesh) -> None:
    rings = [shapely.LinearRing(mesh.vertices[cell]) for cell in mesh.cells]
    simple = shapely.is_simple(rings)
    for c in range(mesh.n_cells):
        if mesh.areas[c] <= 0 or not simple[c]:
            raise MeshGenerationError("cell is not a simple CCW polygon", cell_id=c)
        poly = mesh.vertices[mesh.cells[c]]
        if not in_kernel(poly, mesh.star_points[c], KERNEL_MARGIN * mesh.diameters[c]):
            raise MeshGenerationError("cell is not star-shaped", cell_id=c)
    total = float(mesh.areas.sum())
    if abs(total - 1.0) > 1e-12:
        raise MeshGenerationError(f"cell areas sum to {total!r}, not 1")

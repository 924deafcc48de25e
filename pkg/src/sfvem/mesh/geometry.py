"""
Polygonal mesh representation and per-cell geometry.

Cells are counter-clockwise vertex cycles. Edges carry a global orientation
from the lower to the higher vertex index; the cell that traverses an edge in
that direction is its left cell.
"""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import linprog
from scipy.spatial.distance import pdist

from ..exceptions import MeshFormatError

FloatArray = NDArray[np.float64]
IntArray = NDArray[np.int64]

BOUNDARY_TOL = 1e-12
KERNEL_MARGIN = 1e-10


@dataclass(frozen=True)
class CellGeometry:
    """Geometry of a single cell."""

    index: int
    vertices: FloatArray
    centroid: FloatArray
    diameter: float
    area: float
    star_point: FloatArray

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def translated(self, shift: ArrayLike) -> "CellGeometry":
        shift = np.asarray(shift, dtype=float)
        return CellGeometry(
            index=self.index,
            vertices=self.vertices + shift,
            centroid=self.centroid + shift,
            diameter=self.diameter,
            area=self.area,
            star_point=self.star_point + shift,
        )


def signed_area(vertices: FloatArray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def polygon_centroid(vertices: FloatArray) -> FloatArray:
    x, y = vertices[:, 0], vertices[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = 0.5 * cross.sum()
    if abs(area) <= 1e-300:
        return vertices.mean(axis=0)
    return np.array([((x + xn) * cross).sum(), ((y + yn) * cross).sum()]) / (6 * area)


def kernel_halfplanes(vertices: FloatArray) -> tuple[FloatArray, FloatArray]:
    """
    Inward unit normals and offsets of the edge half-planes.

    The kernel of a simple CCW polygon is ``{x : normals @ x >= offsets}``.
    Zero-length edges are dropped.
    """
    direction = np.roll(vertices, -1, axis=0) - vertices
    length = np.hypot(direction[:, 0], direction[:, 1])
    keep = length > 0
    normals = np.stack([-direction[keep, 1], direction[keep, 0]], axis=1)
    normals /= length[keep, None]
    offsets = np.einsum("ij,ij->i", normals, vertices[keep])
    return normals, offsets


def in_kernel(vertices: FloatArray, point: ArrayLike, margin: float = 0.0) -> bool:
    """True when ``point`` sees the whole boundary with clearance ``margin``."""
    normals, offsets = kernel_halfplanes(vertices)
    return bool(np.all(normals @ np.asarray(point, float) - offsets > margin))


def star_radius(vertices: FloatArray) -> tuple[float, FloatArray]:
    """
    Largest ball inside the polygon kernel.

    Solves ``max r`` subject to ``n_i . x - r >= n_i . a_i`` for every edge.

    Returns:
        (radius, center); radius is 0 for cells with an empty or flat kernel
    """
    normals, offsets = kernel_halfplanes(vertices)
    a_ub = np.hstack([-normals, np.ones((len(normals), 1))])
    result = linprog(
        c=[0.0, 0.0, -1.0],
        A_ub=a_ub,
        b_ub=-offsets,
        bounds=[(None, None), (None, None), (None, None)],
        method="highs",
    )
    if not result.success:
        return 0.0, vertices.mean(axis=0)
    return max(float(result.x[2]), 0.0), np.asarray(result.x[:2], dtype=float)


def reflex_vertices(vertices: FloatArray) -> IntArray:
    """Indices of vertices with an interior angle above pi (CCW input)."""
    incoming = vertices - np.roll(vertices, 1, axis=0)
    outgoing = np.roll(vertices, -1, axis=0) - vertices
    cross = incoming[:, 0] * outgoing[:, 1] - incoming[:, 1] * outgoing[:, 0]
    return np.flatnonzero(cross < -1e-14)


def _on_boundary(points: FloatArray) -> NDArray[np.bool_]:
    near = np.abs(points) <= BOUNDARY_TOL
    near |= np.abs(points - 1.0) <= BOUNDARY_TOL
    return np.asarray(near.any(axis=1))


def _same_side(a: FloatArray, b: FloatArray) -> bool:
    for axis in (0, 1):
        for side in (0.0, 1.0):
            on_a = abs(a[axis] - side) <= BOUNDARY_TOL
            if on_a and abs(b[axis] - side) <= BOUNDARY_TOL:
                return True
    return False


@dataclass(frozen=True)
class PolygonMesh:
    """
    Conforming polygonal mesh of the unit square.

    ``edge_cells[e] = (left, right)`` with -1 for a missing neighbour;
    ``cell_edges[c][j]`` is the edge from local vertex j to j+1 and
    ``cell_edge_flipped[c][j]`` tells whether the cell runs it against its
    global orientation.
    """

    vertices: FloatArray
    cells: tuple[IntArray, ...]
    edges: IntArray
    edge_cells: IntArray
    cell_edges: tuple[IntArray, ...]
    cell_edge_flipped: tuple[NDArray[np.bool_], ...]
    boundary_vertex: NDArray[np.bool_]
    boundary_edge: NDArray[np.bool_]
    centroids: FloatArray
    diameters: FloatArray
    areas: FloatArray
    star_points: FloatArray

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def cell(self, index: int) -> CellGeometry:
        return CellGeometry(
            index=index,
            vertices=self.vertices[self.cells[index]],
            centroid=self.centroids[index],
            diameter=float(self.diameters[index]),
            area=float(self.areas[index]),
            star_point=self.star_points[index],
        )

    def edge_length(self, edge: int) -> float:
        a, b = self.vertices[self.edges[edge]]
        return float(np.hypot(*(b - a)))

    @classmethod
    def from_cells(
        cls, vertices: ArrayLike, cells: Sequence[Sequence[int]]
    ) -> "PolygonMesh":
        """
        Build edges, adjacency, boundary flags and the geometry cache.

        Args:
            vertices: (nv, 2) coordinates
            cells: CCW vertex-index cycles

        Raises:
            MeshFormatError: bad indices, short cells, or an edge traversed
                twice in the same direction
        """
        coords = np.asarray(vertices, dtype=float).reshape(-1, 2)
        n_vertices = len(coords)
        cell_arrays = []
        for c, cell in enumerate(cells):
            arr = np.asarray(cell, dtype=np.int64)
            if arr.ndim != 1 or len(arr) < 3:
                raise MeshFormatError(f"cell {c} needs at least 3 vertices")
            if arr.min() < 0 or arr.max() >= n_vertices:
                raise MeshFormatError(f"cell {c} references a missing vertex")
            if np.any(arr == np.roll(arr, -1)):
                raise MeshFormatError(f"cell {c} repeats a vertex consecutively")
            arr.setflags(write=False)
            cell_arrays.append(arr)

        edge_ids: dict[tuple[int, int], int] = {}
        edge_list: list[tuple[int, int]] = []
        adjacency: list[list[int]] = []
        cell_edges = []
        cell_flipped = []
        for c, arr in enumerate(cell_arrays):
            ids = np.empty(len(arr), dtype=np.int64)
            flipped = np.empty(len(arr), dtype=bool)
            for j, (a, b) in enumerate(zip(arr, np.roll(arr, -1), strict=True)):
                key = (int(min(a, b)), int(max(a, b)))
                e = edge_ids.get(key)
                if e is None:
                    e = edge_ids[key] = len(edge_list)
                    edge_list.append(key)
                    adjacency.append([-1, -1])
                slot = 0 if a < b else 1
                if adjacency[e][slot] != -1:
                    raise MeshFormatError(
                        f"edge {key} traversed twice in the same direction "
                        f"(cells {adjacency[e][slot]} and {c})"
                    )
                adjacency[e][slot] = c
                ids[j], flipped[j] = e, slot == 1
            cell_edges.append(ids)
            cell_flipped.append(flipped)

        edges = np.array(edge_list, dtype=np.int64).reshape(-1, 2)
        boundary_edge = np.array(
            [_same_side(coords[a], coords[b]) for a, b in edges], dtype=bool
        )

        n_cells = len(cell_arrays)
        centroids = np.empty((n_cells, 2))
        diameters = np.empty(n_cells)
        areas = np.empty(n_cells)
        star_points = np.empty((n_cells, 2))
        for c, arr in enumerate(cell_arrays):
            poly = coords[arr]
            areas[c] = signed_area(poly)
            centroids[c] = polygon_centroid(poly)
            diameters[c] = pdist(poly).max()
            star_points[c] = _star_point(poly, centroids[c], diameters[c])

        return cls(
            vertices=coords,
            cells=tuple(cell_arrays),
            edges=edges,
            edge_cells=np.array(adjacency, dtype=np.int64).reshape(-1, 2),
            cell_edges=tuple(cell_edges),
            cell_edge_flipped=tuple(cell_flipped),
            boundary_vertex=_on_boundary(coords),
            boundary_edge=boundary_edge,
            centroids=centroids,
            diameters=diameters,
            areas=areas,
            star_points=star_points,
        )


def _star_point(poly: FloatArray, centroid: FloatArray, diameter: float) -> FloatArray:
    if in_kernel(poly, centroid, KERNEL_MARGIN * diameter):
        return centroid
    radius, center = star_radius(poly)
    return center if radius > 0 else centroid


def mesh_size(mesh: PolygonMesh) -> float:
    """Largest cell diameter."""
    if mesh.n_cells == 0:
        raise MeshFormatError("mesh has no cells")
    return float(mesh.diameters.max())

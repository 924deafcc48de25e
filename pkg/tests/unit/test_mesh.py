"""
Tests for mesh generation, structure, text I/O and validation.
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from sfvem.exceptions import MeshFormatError, MeshGenerationError
from sfvem.mesh import (
    FamilyTag,
    MeshFamily,
    generate_mesh,
    in_kernel,
    mesh_size,
    read_mesh,
    reflex_vertices,
    star_radius,
    validate_mesh,
    write_mesh,
)
from sfvem.mesh.geometry import PolygonMesh
from tests.factories import build_mesh

pytestmark = pytest.mark.unit


class TestMeshFamily:
    """Test the family model and its shape parameter."""

    def test_default_delta(self):
        """Test each family falls back to its default displacement."""
        assert MeshFamily(tag="quad").shape_delta == 0.0
        assert MeshFamily(tag="pentagon").shape_delta == 0.1
        assert MeshFamily(tag="octagon").shape_delta == 0.15

    def test_explicit_delta(self):
        """Test an explicit delta overrides the default."""
        assert MeshFamily(tag="octagon", delta=0.2).shape_delta == 0.2

    def test_delta_out_of_range(self):
        """Test delta outside [0, 0.25] is rejected."""
        with pytest.raises(ValidationError):
            MeshFamily(tag="pentagon", delta=0.3)
        with pytest.raises(ValidationError):
            MeshFamily(tag="pentagon", delta=-0.01)

    def test_family_aliases(self):
        """Test T1-T3 aliases resolve to the canonical tags."""
        assert FamilyTag("t1") is FamilyTag.QUAD
        assert FamilyTag("T2") is FamilyTag.PENTAGON
        assert FamilyTag("t3") is FamilyTag.OCTAGON


class TestGenerateMesh:
    """Test the three mesh constructions."""

    def test_quad_counts(self):
        """Test T1 with n=2 has 9 vertices, 4 cells and h = sqrt(2)/2."""
        mesh = build_mesh("quad", 2)
        assert mesh.n_vertices == 9
        assert mesh.n_cells == 4
        assert mesh.n_edges == 12
        assert mesh_size(mesh) == pytest.approx(math.sqrt(2) / 2, rel=1e-14)

    def test_pentagon_cells(self):
        """Test T2 with n=4 has 32 five-vertex cells."""
        mesh = build_mesh("pentagon", 4)
        assert mesh.n_cells == 32
        assert all(len(cell) == 5 for cell in mesh.cells)

    def test_octagon_cells_are_concave(self):
        """Test T3 with n=4 has 16 eight-vertex cells, each with a reflex vertex."""
        mesh = build_mesh("octagon", 4, delta=0.15)
        assert mesh.n_cells == 16
        for c, cell in enumerate(mesh.cells):
            assert len(cell) == 8
            assert len(reflex_vertices(mesh.vertices[cell])) >= 1, c

    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_euler_characteristic(self, family, n):
        """Test V - E + F = 1 for every family and level."""
        mesh = build_mesh(family, n)
        assert mesh.n_vertices - mesh.n_edges + mesh.n_cells == 1

    @pytest.mark.parametrize("n", [1, 3, 4])
    def test_areas_sum_to_one(self, family, n):
        """Test cells cover the unit square."""
        mesh = build_mesh(family, n)
        assert np.all(mesh.areas > 0)
        assert mesh.areas.sum() == pytest.approx(1.0, abs=1e-12)

    def test_edge_sharing(self, family):
        """Test interior edges have two cells and boundary edges one."""
        mesh = build_mesh(family, 3)
        both = np.all(mesh.edge_cells >= 0, axis=1)
        assert np.array_equal(~both, mesh.boundary_edge)
        for a, b in mesh.edges[mesh.boundary_edge]:
            pa, pb = mesh.vertices[a], mesh.vertices[b]
            on_side = np.isclose(pa, pb) & (np.isclose(pa, 0.0) | np.isclose(pa, 1.0))
            assert on_side.any()

    def test_edge_orientation(self, family):
        """Test edges run from the lower to the higher vertex index."""
        mesh = build_mesh(family, 2)
        assert np.all(mesh.edges[:, 0] < mesh.edges[:, 1])

    def test_star_points_in_kernel(self, family):
        """Test every cell is star-shaped with respect to its star-point."""
        mesh = build_mesh(family, 3)
        for c, cell in enumerate(mesh.cells):
            assert in_kernel(mesh.vertices[cell], mesh.star_points[c])

    def test_mesh_size_decreases(self, family):
        """Test h halves when n doubles."""
        coarse = mesh_size(build_mesh(family, 2))
        fine = mesh_size(build_mesh(family, 4))
        assert fine == pytest.approx(coarse / 2, rel=1e-12)

    def test_invalid_level(self):
        """Test n < 1 is rejected."""
        with pytest.raises(MeshGenerationError):
            generate_mesh(MeshFamily(tag="quad"), 0)

    def test_deterministic(self, family):
        """Test repeated generation gives bit-identical vertices, cells and edges."""
        first = build_mesh(family, 4)
        second = build_mesh(family, 4)
        assert first.vertices.tobytes() == second.vertices.tobytes()
        assert len(first.cells) == len(second.cells)
        for a, b in zip(first.cells, second.cells, strict=True):
            assert np.array_equal(a, b)
        assert np.array_equal(first.edges, second.edges)
        assert first.star_points.tobytes() == second.star_points.tobytes()


class TestPolygonMesh:
    """Test structural checks of PolygonMesh.from_cells."""

    def test_short_cell(self):
        """Test a cell with two vertices is rejected."""
        with pytest.raises(MeshFormatError):
            PolygonMesh.from_cells([[0, 0], [1, 0], [0, 1]], [[0, 1]])

    def test_missing_vertex(self):
        """Test an out-of-range vertex index is rejected."""
        with pytest.raises(MeshFormatError):
            PolygonMesh.from_cells([[0, 0], [1, 0], [0, 1]], [[0, 1, 3]])

    def test_same_direction_edge(self):
        """Test two cells traversing an edge the same way are rejected."""
        vertices = [[0, 0], [1, 0], [1, 1], [0, 1]]
        with pytest.raises(MeshFormatError):
            PolygonMesh.from_cells(vertices, [[0, 1, 2], [0, 1, 3]])

    def test_adjacency(self):
        """Test left/right cells of the diagonal of a split square."""
        vertices = [[0, 0], [1, 0], [1, 1], [0, 1]]
        mesh = PolygonMesh.from_cells(vertices, [[0, 1, 2], [0, 2, 3]])
        diagonal = [tuple(e) for e in mesh.edges.tolist()].index((0, 2))
        assert tuple(mesh.edge_cells[diagonal]) == (1, 0)
        assert not mesh.boundary_edge[diagonal]
        assert mesh.boundary_vertex.all()


class TestGeometry:
    """Test kernel and star-radius helpers."""

    def test_square_star_radius(self):
        """Test the kernel ball of the unit square has radius 1/2."""
        square = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
        radius, center = star_radius(square)
        assert radius == pytest.approx(0.5, abs=1e-9)
        assert center == pytest.approx([0.5, 0.5], abs=1e-9)

    def test_reflex_vertex_of_arrow(self):
        """Test the notch of an arrow-shaped quadrilateral is reflex."""
        arrow = np.array([[0.0, 0.0], [1.0, 0.5], [0.0, 1.0], [0.3, 0.5]])
        assert reflex_vertices(arrow).tolist() == [3]

    def test_point_outside_kernel(self):
        """Test a point behind the notch does not see the whole boundary."""
        arrow = np.array([[0.0, 0.0], [1.0, 0.5], [0.0, 1.0], [0.3, 0.5]])
        assert in_kernel(arrow, [0.6, 0.5])
        assert not in_kernel(arrow, [0.05, 0.5])


class TestMeshIO:
    """Test the mesh text format."""

    def test_round_trip(self, tmp_path, family):
        """Test write then read reproduces vertices, cells and boundary flags."""
        mesh = build_mesh(family, 3)
        path = write_mesh(mesh, tmp_path / "mesh.txt")
        loaded = read_mesh(path)
        assert np.array_equal(loaded.vertices, mesh.vertices)
        assert [c.tolist() for c in loaded.cells] == [c.tolist() for c in mesh.cells]
        assert np.array_equal(loaded.boundary_vertex, mesh.boundary_vertex)
        assert np.array_equal(loaded.boundary_edge, mesh.boundary_edge)

    def test_header(self, tmp_path):
        """Test the first line holds the vertex and cell counts."""
        path = write_mesh(build_mesh("quad", 2), tmp_path / "mesh.txt")
        assert path.read_text().splitlines()[0] == "9 4"

    @pytest.mark.parametrize(
        "text",
        [
            "",
            "3\n",
            "3 1\n0 0\n1 0\n0 1\n",
            "3 1\n0 0\n1 x\n0 1\n3 0 1 2\n",
            "3 1\n0 0\n1 0\n0 1\n4 0 1 2\n",
            "3 1\n0 0\n1 0\n0 1\n3 0 1 5\n",
        ],
        ids=["empty", "header", "count", "token", "cell-count", "index"],
    )
    def test_malformed(self, tmp_path, text):
        """Test malformed files raise MeshFormatError."""
        path = tmp_path / "bad.txt"
        path.write_text(text)
        with pytest.raises(MeshFormatError):
            read_mesh(path)

    def test_missing_file(self, tmp_path):
        """Test a missing file raises MeshFormatError."""
        with pytest.raises(MeshFormatError):
            read_mesh(tmp_path / "missing.txt")


class TestValidateMesh:
    """Test shape-regularity validation."""

    def test_generated_meshes_pass(self, family):
        """Test the default family meshes pass with c_T = 0.05."""
        report = validate_mesh(build_mesh(family, 4), 0.05)
        assert report.passed
        assert report.offending_cells == []
        assert report.non_simple_cells == []

    def test_quad_ratios(self):
        """Test T1 ratios: inradius/diameter and edge/diameter."""
        report = validate_mesh(build_mesh("quad", 2), 0.05)
        assert report.min_star_radius_ratio == pytest.approx(0.5 / math.sqrt(2), 1e-6)
        assert report.min_edge_ratio == pytest.approx(1 / math.sqrt(2), 1e-12)
        assert report.max_vertex_count == 4

    def test_strict_constant_fails(self):
        """Test a constant above the attained ratios fails every cell."""
        report = validate_mesh(build_mesh("quad", 2), 0.5)
        assert not report.passed
        assert report.offending_cells == [0, 1, 2, 3]

    def test_degenerate_edge_ratio(self):
        """Test a cell with a tiny edge is reported."""
        vertices = [[0, 0], [1, 0], [1, 1], [1e-4, 1], [0, 1]]
        mesh = PolygonMesh.from_cells(vertices, [[0, 1, 2, 3, 4]])
        report = validate_mesh(mesh, 0.05)
        assert not report.passed
        assert report.offending_cells == [0]

"""
Tests for the local projectors.

Every projector must reproduce polynomials of degree k exactly, so the DOF
vector D c of a polynomial with scaled-monomial coefficients c is mapped
back to c (or to the coefficients of its gradient).
"""

import numpy as np
import pytest

from sfvem.assembly import GlobalDofMap, default_ell_rule, interpolate
from sfvem.polybasis import MonomialBasis, gradient_coordinates
from sfvem.projection import DofLayout, compute_element_projections
from tests.factories import (
    build_mesh,
    build_projections,
    monomial_coefficients,
    polynomial_field,
    random_polynomial,
)

pytestmark = pytest.mark.unit

N_POLYNOMIALS = 20
REPRODUCTION_TOL = 1e-10


def relative_error(value: np.ndarray, expected: np.ndarray) -> float:
    return float(np.linalg.norm(value - expected) / np.linalg.norm(expected))


class TestDofLayout:
    """Test local DOF ordering."""

    def test_sizes(self, pentagon_mesh):
        """Test N_E vertex, (k-1) N_E edge and k(k-1)/2 interior DOFs."""
        layout = DofLayout.for_cell(pentagon_mesh, 0, 3)
        assert layout.n_vertices == 5
        assert layout.n_interior == 3
        assert layout.size == 18
        assert layout.edge_dofs(1).tolist() == [7, 8]
        assert layout.interior_dofs.tolist() == [15, 16, 17]

    def test_edge_orientation(self, quad_mesh):
        """Test flipped edges are read from the higher-index vertex."""
        for c in range(quad_mesh.n_cells):
            layout = DofLayout.for_cell(quad_mesh, c, 2)
            cell = quad_mesh.cells[c]
            for j in range(layout.n_vertices):
                a, b = layout.edge_vertices(j)
                assert cell[a] < cell[b]

    def test_outward_normals(self, quad_mesh):
        """Test unit normals of the lower-left square point out of it."""
        layout = DofLayout.for_cell(quad_mesh, 0, 2)
        normals = [layout.outward_normal(j) for j in range(4)]
        assert np.allclose(normals, [[0, -1], [1, 0], [0, 1], [-1, 0]])


class TestReproduction:
    """Projectors reproduce P_k on every family."""

    @pytest.mark.parametrize("n", [2, 4])
    @pytest.mark.parametrize("k", [2, 3, 4])
    def test_polynomial_reproduction(self, family, n, k):
        """Test Pi_nabla, Pi0, Pi0 grad and Pi_P grad on 20 random polynomials."""
        mesh = build_mesh(family, n)
        rng = np.random.default_rng(1000 * n + k)
        for c in range(mesh.n_cells):
            layout = DofLayout.for_cell(mesh, c, k)
            element = compute_element_projections(
                layout, default_ell_rule(layout.n_vertices)
            )
            coeffs = rng.normal(size=(element.d.shape[1], N_POLYNOMIALS))
            dofs = element.d @ coeffs

            assert relative_error(element.pi_nabla @ dofs, coeffs) < REPRODUCTION_TOL
            assert relative_error(element.pi_zero @ dofs, coeffs) < REPRODUCTION_TOL

            grad = element.quad.basis
            lower = MonomialBasis(grad.center, grad.diameter, k - 1).size
            expected = np.vstack(
                [
                    grad.derivative_matrix(0)[:lower] @ coeffs,
                    grad.derivative_matrix(1)[:lower] @ coeffs,
                ]
            )
            assert (
                relative_error(element.pi_zero_grad @ dofs, expected)
                < REPRODUCTION_TOL
            )

            pkl_expected = gradient_coordinates(element.pkl) @ coeffs
            assert (
                relative_error(element.pi_p_grad.matrix @ dofs, pkl_expected)
                < REPRODUCTION_TOL
            )

    def test_projected_values(self):
        """Test projected values at quadrature points match the polynomial."""
        rng = np.random.default_rng(3)
        p, grad = polynomial_field(random_polynomial(2, rng))
        mesh, projections = build_projections("octagon", 2, 2)
        dofmap = GlobalDofMap.build(mesh, 2)
        full = interpolate(dofmap, projections, p)
        for element, idx in zip(projections, dofmap.cell_dofs, strict=True):
            points = element.quad.rule.points
            assert element.pi_zero_values(full[idx]).real == pytest.approx(
                p(points), abs=1e-10
            )
            assert element.pi_p_grad_values(full[idx]).real == pytest.approx(
                grad(points), abs=1e-9
            )


class TestDofMatrix:
    """Test D against the DOF definitions."""

    @pytest.mark.parametrize("k", [2, 3])
    def test_matches_interpolation(self, family, k):
        """Test D c equals the interpolated DOFs of the same polynomial."""
        rng = np.random.default_rng(k)
        p, _ = polynomial_field(random_polynomial(k, rng))
        mesh, projections = build_projections(family, 2, k)
        dofmap = GlobalDofMap.build(mesh, k)
        full = interpolate(dofmap, projections, p)
        for element, idx in zip(projections, dofmap.cell_dofs, strict=True):
            coeffs = monomial_coefficients(element.quad.basis, p)
            assert element.d @ coeffs == pytest.approx(full[idx].real, abs=1e-10)


class TestPklProjection:
    """Test the orthonormal factorization of the P_{k,l} projection."""

    def test_change_of_basis(self, pentagon_mesh):
        """Test generator coordinates equal change @ orthonormal coordinates."""
        layout = DofLayout.for_cell(pentagon_mesh, 1, 2)
        element = compute_element_projections(layout, 2)
        pkl = element.pi_p_grad
        assert pkl.change @ pkl.orthonormal == pytest.approx(pkl.matrix, abs=1e-10)
        assert pkl.condition >= 1.0

    def test_orthonormal_frame(self, quad_mesh):
        """Test the columns of change give L2-orthonormal vector fields."""
        layout = DofLayout.for_cell(quad_mesh, 0, 2)
        element = compute_element_projections(layout, 1)
        rule = element.quad.rule
        frame = np.einsum(
            "pgc,gh->phc", element.pkl.values(rule.points), element.pi_p_grad.change
        )
        gram = np.einsum("q,qac,qbc->ab", rule.weights, frame, frame)
        assert gram == pytest.approx(np.eye(len(gram)), abs=1e-9)


class TestTranslationInvariance:
    """Test projector matrices depend only on the cell shape."""

    @pytest.mark.parametrize("k", [2, 3])
    def test_translated_cell(self, family, k):
        """Test translating a cell leaves D and every projector unchanged."""
        mesh = build_mesh(family, 2)
        layout = DofLayout.for_cell(mesh, 3, k)
        moved = DofLayout(
            cell=layout.cell.translated([3.25, -1.5]),
            k=k,
            edge_flipped=layout.edge_flipped,
        )
        ell = default_ell_rule(layout.n_vertices)
        here = compute_element_projections(layout, ell)
        there = compute_element_projections(moved, ell)
        pairs = [
            (here.d, there.d),
            (here.pi_nabla, there.pi_nabla),
            (here.pi_zero, there.pi_zero),
            (here.pi_zero_grad, there.pi_zero_grad),
            (here.pi_p_grad.matrix, there.pi_p_grad.matrix),
        ]
        for original, translated in pairs:
            assert translated == pytest.approx(
                original, abs=1e-10 * np.abs(original).max()
            )

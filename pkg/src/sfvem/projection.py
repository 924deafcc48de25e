"""
Local projection operators acting on virtual element degrees of freedom.

Local DOFs of a cell with N_E vertices, in order:

- N_E vertex values;
- k-1 scaled moments ``h_e^-1 (v, t**i)_e`` per edge, local edge j running
  from vertex j to j+1, with t measured along the edge's global orientation;
- k(k-1)/2 scaled interior moments ``|E|^-1 (v, m_a)_E``, |a| <= k-2.

All projector matrices map a DOF vector to coefficients in the scaled
monomial basis of the cell (or to P_{k,l} generator coordinates). Integrals
against a virtual function are reduced by parts to interior moments and to
edge traces reconstructed from the vertex values and edge moments.
"""

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import qr, solve_triangular

from .config import get_settings
from .exceptions import ElementError
from .log import get_component_logger
from .mesh.geometry import CellGeometry, PolygonMesh
from .polybasis import (
    MonomialBasis,
    PklBasis,
    build_pkl_basis,
    edge_trace_inverse,
    polynomial_dimension,
)
from .quadrature import (
    CellRule,
    EdgeRule,
    build_cell_rule,
    build_edge_rule,
    default_cell_exactness,
    default_edge_exactness,
)

logger = get_component_logger("sfvem.projection")

FloatArray = NDArray[np.float64]

SOLVE_RANK_TOL = 1e-14
GRAM_RANK_TOL = 1e-10


@dataclass(frozen=True)
class DofLayout:
    """Local DOF ordering of one cell."""

    cell: CellGeometry
    k: int
    edge_flipped: tuple[bool, ...]

    @classmethod
    def for_cell(cls, mesh: PolygonMesh, index: int, k: int) -> "DofLayout":
        return cls(
            cell=mesh.cell(index),
            k=k,
            edge_flipped=tuple(bool(f) for f in mesh.cell_edge_flipped[index]),
        )

    @property
    def n_vertices(self) -> int:
        return self.cell.n_vertices

    @property
    def n_interior(self) -> int:
        return polynomial_dimension(self.k - 2)

    @property
    def size(self) -> int:
        return self.n_vertices * self.k + self.n_interior

    def edge_dofs(self, j: int) -> NDArray[np.int64]:
        start = self.n_vertices + j * (self.k - 1)
        return np.arange(start, start + self.k - 1)

    @property
    def interior_dofs(self) -> NDArray[np.int64]:
        start = self.n_vertices * self.k
        return np.arange(start, start + self.n_interior)

    def edge_vertices(self, j: int) -> tuple[int, int]:
        """Local vertex indices of edge j in its global orientation."""
        a, b = j, (j + 1) % self.n_vertices
        return (b, a) if self.edge_flipped[j] else (a, b)

    def outward_normal(self, j: int) -> FloatArray:
        verts = self.cell.vertices
        d = verts[(j + 1) % self.n_vertices] - verts[j]
        return np.array([d[1], -d[0]]) / np.hypot(d[0], d[1])


@dataclass(frozen=True)
class ElementQuadrature:
    """
    Integration context of one cell.

    ``traces[j]`` maps local DOFs to values of the degree-k trace at the
    points of ``edge_rules[j]``.
    """

    basis: MonomialBasis
    rule: CellRule
    edge_rules: tuple[EdgeRule, ...]
    normals: tuple[FloatArray, ...]
    traces: tuple[FloatArray, ...]
    mass: FloatArray


def element_quadrature(
    layout: DofLayout,
    ell: int,
    cell_exactness: int | None = None,
    edge_exactness: int | None = None,
) -> ElementQuadrature:
    """Build cell/edge rules, edge trace maps and the monomial mass matrix."""
    cell, k = layout.cell, layout.k
    if cell_exactness is None:
        cell_exactness = default_cell_exactness(k, ell)
    if edge_exactness is None:
        edge_exactness = default_edge_exactness(k, ell)

    basis = MonomialBasis(cell.centroid, cell.diameter, k)
    rule = build_cell_rule(cell, cell_exactness)
    inverse = edge_trace_inverse(k)

    edge_rules, normals, traces = [], [], []
    for j in range(layout.n_vertices):
        a, b = layout.edge_vertices(j)
        edge_rule = build_edge_rule(cell.vertices[a], cell.vertices[b], edge_exactness)
        local = (edge_rule.params[:, None] ** np.arange(k + 1)) @ inverse
        trace = np.zeros((len(edge_rule.weights), layout.size))
        trace[:, a] += local[:, 0]
        trace[:, b] += local[:, 1]
        trace[:, layout.edge_dofs(j)] += local[:, 2:]
        edge_rules.append(edge_rule)
        normals.append(layout.outward_normal(j))
        traces.append(trace)

    values = basis.values(rule.points)
    mass = values.T @ (rule.weights[:, None] * values)
    return ElementQuadrature(
        basis=basis,
        rule=rule,
        edge_rules=tuple(edge_rules),
        normals=tuple(normals),
        traces=tuple(traces),
        mass=mass,
    )


def _pivoted_solve(
    matrix: FloatArray, rhs: FloatArray, cell: CellGeometry, what: str
) -> FloatArray:
    q, r, perm = qr(matrix, pivoting=True)
    diag = np.abs(np.diag(r))
    if diag[-1] <= SOLVE_RANK_TOL * diag[0]:
        raise ElementError(f"singular {what} system", cell_id=cell.index)
    condition = diag[0] / diag[-1]
    if condition > get_settings().condition_warn:
        logger.warning(
            "Ill-conditioned projector solve",
            cell=cell.index,
            system=what,
            condition=float(condition),
        )
    solution = np.empty((matrix.shape[1], *rhs.shape[1:]))
    solution[perm] = solve_triangular(r, q.T @ rhs)
    return solution


def dof_matrix(layout: DofLayout, quad: ElementQuadrature) -> FloatArray:
    """
    DOFs of the scaled monomials of degree <= k.

    Returns:
        (ndof, dim P_k) matrix with ``D[i, a] = dof_i(m_a)``
    """
    basis, k = quad.basis, layout.k
    d = np.zeros((layout.size, basis.size))
    d[: layout.n_vertices] = basis.values(layout.cell.vertices)
    for j, edge_rule in enumerate(quad.edge_rules):
        length = edge_rule.weights.sum()
        moments = edge_rule.params[:, None] ** np.arange(k - 1)
        moments *= (edge_rule.weights / length)[:, None]
        d[layout.edge_dofs(j)] = moments.T @ basis.values(edge_rule.points)
    d[layout.interior_dofs] = quad.mass[: layout.n_interior] / layout.cell.area
    return d


def elliptic_projector(layout: DofLayout, quad: ElementQuadrature) -> FloatArray:
    """
    Coefficients of the elliptic projection, shape (dim P_k, ndof).

    The gradient equations come from integrating by parts; the constant mode
    is fixed by matching the cell mean, which is the first interior DOF.
    """
    basis, rule, area = quad.basis, quad.rule, layout.cell.area
    grads = basis.gradients(rule.points)
    stiffness = np.einsum("q,qac,qbc->ab", rule.weights, grads, grads)

    rhs = np.zeros((basis.size, layout.size))
    rhs[:, layout.interior_dofs] = -area * basis.laplacian_matrix().T
    for edge_rule, normal, trace in zip(
        quad.edge_rules, quad.normals, quad.traces, strict=True
    ):
        normal_derivative = basis.gradients(edge_rule.points) @ normal
        rhs += normal_derivative.T @ (edge_rule.weights[:, None] * trace)

    stiffness[0] = quad.mass[0] / area
    rhs[0] = 0.0
    rhs[0, layout.interior_dofs[0]] = 1.0
    return _pivoted_solve(stiffness, rhs, layout.cell, "elliptic projection")


def l2_projector(
    layout: DofLayout, quad: ElementQuadrature, pi_nabla: FloatArray
) -> FloatArray:
    """
    Coefficients of the L2 projection onto P_k, shape (dim P_k, ndof).

    Moments against P_{k-2} are the interior DOFs; moments against the
    remaining monomials are those of the elliptic projection.
    """
    n_low = layout.n_interior
    moments = np.zeros((quad.basis.size, layout.size))
    moments[:n_low, layout.interior_dofs] = layout.cell.area * np.eye(n_low)
    moments[n_low:] = quad.mass[n_low:] @ pi_nabla
    return _pivoted_solve(quad.mass, moments, layout.cell, "L2 projection")


def grad_l2_projector(layout: DofLayout, quad: ElementQuadrature) -> FloatArray:
    """
    L2 projection of the gradient onto [P_{k-1}]^2, shape (2 dim P_{k-1}, ndof).

    Rows hold the x-component coefficients first, then the y-component.
    """
    cell = layout.cell
    lower = MonomialBasis(cell.centroid, cell.diameter, layout.k - 1)
    mass = quad.mass[: lower.size, : lower.size]
    blocks = []
    for axis in (0, 1):
        rhs = np.zeros((lower.size, layout.size))
        rhs[:, layout.interior_dofs] = -cell.area * lower.derivative_matrix(axis).T
        for edge_rule, normal, trace in zip(
            quad.edge_rules, quad.normals, quad.traces, strict=True
        ):
            values = lower.values(edge_rule.points) * normal[axis]
            rhs += values.T @ (edge_rule.weights[:, None] * trace)
        blocks.append(_pivoted_solve(mass, rhs, cell, "gradient L2 projection"))
    return np.vstack(blocks)


@dataclass(frozen=True)
class PklProjection:
    """
    Gradient projection onto P_{k,l}.

    ``matrix`` gives generator coordinates. ``orthonormal`` gives coordinates
    in an L2(E)-orthonormal basis of the same span whose generator
    coordinates are the columns of ``change``.
    """

    matrix: FloatArray
    orthonormal: FloatArray
    change: FloatArray
    condition: float


def pkl_grad_projector(
    layout: DofLayout, quad: ElementQuadrature, pkl: PklBasis
) -> PklProjection:
    """
    L2 projection of the gradient onto P_{k,l}.

    Right-hand sides use (grad v, p) = -(v, div p) + (v, p.n) on the boundary,
    where only the x-part generators have a divergence. The Gram system is
    solved through a column-pivoted QR of the square-root-weighted generator
    values.

    Raises:
        ElementError: numerically rank-deficient generator Gram matrix
    """
    cell, rule = layout.cell, quad.rule
    root = np.sqrt(rule.weights)[:, None]
    values = pkl.values(rule.points)
    weighted = np.vstack([root * values[:, :, 0], root * values[:, :, 1]])
    _, r, perm = qr(weighted, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag[-1] <= GRAM_RANK_TOL * diag[0]:
        raise ElementError(
            f"P_(k,l) Gram matrix is rank-deficient (k={pkl.k}, l={pkl.ell}); "
            "increase l or repair the cell",
            cell_id=cell.index,
        )
    condition = float((diag[0] / diag[-1]) ** 2)
    if condition > get_settings().condition_warn:
        logger.warning(
            "Ill-conditioned P_(k,l) Gram matrix",
            cell=cell.index,
            k=pkl.k,
            ell=pkl.ell,
            condition=condition,
        )

    rhs = np.zeros((pkl.dimension, layout.size))
    rhs[:, layout.interior_dofs] = -cell.area * pkl.divergence
    for edge_rule, normal, trace in zip(
        quad.edge_rules, quad.normals, quad.traces, strict=True
    ):
        flux = pkl.values(edge_rule.points) @ normal
        rhs += flux.T @ (edge_rule.weights[:, None] * trace)

    orthonormal = solve_triangular(r, rhs[perm], trans="T")
    matrix = np.empty_like(rhs)
    matrix[perm] = solve_triangular(r, orthonormal)
    change = np.empty((pkl.dimension, pkl.dimension))
    change[perm] = solve_triangular(r, np.eye(pkl.dimension))
    return PklProjection(
        matrix=matrix, orthonormal=orthonormal, change=change, condition=condition
    )


@dataclass(frozen=True)
class ElementProjections:
    """All projector matrices of one cell, with the context that built them."""

    layout: DofLayout
    ell: int
    quad: ElementQuadrature
    pkl: PklBasis
    d: FloatArray
    pi_nabla: FloatArray
    pi_zero: FloatArray
    pi_zero_grad: FloatArray
    pi_p_grad: PklProjection

    @property
    def cell(self) -> CellGeometry:
        return self.layout.cell

    def pi_zero_values(self, dofs: NDArray[np.generic]) -> NDArray[np.generic]:
        """Values of the L2 projection of ``dofs`` at the cell quadrature points."""
        return self.quad.basis.values(self.quad.rule.points) @ (self.pi_zero @ dofs)

    def pi_p_grad_values(self, dofs: NDArray[np.generic]) -> NDArray[np.generic]:
        """Values (npts, 2) of the P_{k,l} gradient projection of ``dofs``."""
        coords = self.pi_p_grad.matrix @ dofs
        return np.einsum("pgc,g->pc", self.pkl.values(self.quad.rule.points), coords)


def compute_element_projections(layout: DofLayout, ell: int) -> ElementProjections:
    """Compute D and the four projector matrices of one cell."""
    quad = element_quadrature(layout, ell)
    cell = layout.cell
    pkl = build_pkl_basis(cell.centroid, cell.diameter, layout.k, ell)
    pi_nabla = elliptic_projector(layout, quad)
    projections = ElementProjections(
        layout=layout,
        ell=ell,
        quad=quad,
        pkl=pkl,
        d=dof_matrix(layout, quad),
        pi_nabla=pi_nabla,
        pi_zero=l2_projector(layout, quad, pi_nabla),
        pi_zero_grad=grad_l2_projector(layout, quad),
        pi_p_grad=pkl_grad_projector(layout, quad, pkl),
    )
    logger.debug(
        "Element projections computed",
        cell=cell.index,
        k=layout.k,
        ell=ell,
        ndof=layout.size,
        condition=projections.pi_p_grad.condition,
    )
    return projections

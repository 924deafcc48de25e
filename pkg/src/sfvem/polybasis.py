"""
Scaled monomial bases on cells and edges, and the enriched vector basis.

Every polynomial in the package is a coefficient vector over a scaled
monomial basis ``m_a(x) = ((x - x_E) / h_E) ** a`` whose multi-indices are
listed in graded lexicographic order: 1, x, y, x^2, xy, y^2, ... The vector
space used by the stabilization-free gradient projection is spanned by
``xi * m_a`` (|a| <= k-2) followed by ``curl_xi m_a`` (1 <= |a| <= k+l), where
``xi`` is the scaled coordinate and curl p = (dp/dy, -dp/dx).
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike, NDArray

FloatArray = NDArray[np.float64]


def polynomial_dimension(degree: int) -> int:
    """Dimension of P_degree in two variables (0 for negative degrees)."""
    if degree < 0:
        return 0
    return (degree + 1) * (degree + 2) // 2


@lru_cache(maxsize=32)
def multi_indices(degree: int) -> tuple[tuple[int, int], ...]:
    """Graded lexicographic multi-indices of total degree <= ``degree``."""
    return tuple((d - j, j) for d in range(degree + 1) for j in range(d + 1))


@lru_cache(maxsize=32)
def index_map(degree: int) -> dict[tuple[int, int], int]:
    """Position of every multi-index in :func:`multi_indices`."""
    return {alpha: i for i, alpha in enumerate(multi_indices(degree))}


@dataclass(frozen=True)
class ScaledMonomialTable:
    """Values (npts, n), gradients (npts, n, 2) and Laplacians (npts, n)."""

    values: FloatArray
    gradients: FloatArray
    laplacians: FloatArray


@dataclass(frozen=True)
class MonomialBasis:
    """Scaled monomials of total degree <= ``degree`` on one cell."""

    center: FloatArray
    diameter: float
    degree: int
    exponents: NDArray[np.int64] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        object.__setattr__(
            self,
            "exponents",
            np.array(multi_indices(self.degree), dtype=np.int64).reshape(-1, 2),
        )

    @property
    def size(self) -> int:
        return polynomial_dimension(self.degree)

    def scaled(self, points: ArrayLike) -> FloatArray:
        """Map physical points to ``xi = (x - x_E) / h_E``."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return (pts - self.center) / self.diameter

    def values(self, points: ArrayLike) -> FloatArray:
        xi = self.scaled(points)
        a, b = self.exponents[:, 0], self.exponents[:, 1]
        return xi[:, 0:1] ** a * xi[:, 1:2] ** b

    def gradients(self, points: ArrayLike) -> FloatArray:
        xi = self.scaled(points)
        a, b = self.exponents[:, 0], self.exponents[:, 1]
        px, py = xi[:, 0:1], xi[:, 1:2]
        dx = a * px ** np.maximum(a - 1, 0) * py**b
        dy = b * px**a * py ** np.maximum(b - 1, 0)
        return np.stack([dx, dy], axis=-1) / self.diameter

    def laplacians(self, points: ArrayLike) -> FloatArray:
        xi = self.scaled(points)
        a, b = self.exponents[:, 0], self.exponents[:, 1]
        px, py = xi[:, 0:1], xi[:, 1:2]
        dxx = a * (a - 1) * px ** np.maximum(a - 2, 0) * py**b
        dyy = b * (b - 1) * px**a * py ** np.maximum(b - 2, 0)
        return (dxx + dyy) / self.diameter**2

    def derivative_matrix(self, axis: int) -> FloatArray:
        """
        Coefficients of d/dx_axis in the basis of one degree less.

        Returns:
            (dim P_{degree-1}, dim P_degree) matrix ``Dd`` with
            ``d m_a / dx_axis = sum_b Dd[b, a] m_b``
        """
        lower = index_map(self.degree - 1) if self.degree >= 1 else {}
        out = np.zeros((polynomial_dimension(self.degree - 1), self.size))
        for col, alpha in enumerate(multi_indices(self.degree)):
            if alpha[axis] == 0:
                continue
            beta = list(alpha)
            beta[axis] -= 1
            out[lower[(beta[0], beta[1])], col] = alpha[axis] / self.diameter
        return out

    def laplacian_matrix(self) -> FloatArray:
        """(dim P_{degree-2}, dim P_degree) matrix of the Laplacian."""
        lower = MonomialBasis(self.center, self.diameter, self.degree - 1)
        return (
            lower.derivative_matrix(0) @ self.derivative_matrix(0)
            + lower.derivative_matrix(1) @ self.derivative_matrix(1)
        )


def evaluate_scaled_monomials(
    basis: MonomialBasis, points: ArrayLike
) -> ScaledMonomialTable:
    """Tabulate m_a, grad m_a and lap m_a at ``points``."""
    return ScaledMonomialTable(
        values=basis.values(points),
        gradients=basis.gradients(points),
        laplacians=basis.laplacians(points),
    )


@dataclass(frozen=True)
class EdgeMonomialBasis:
    """
    Scaled monomials ``t ** j`` on an oriented edge.

    The edge parameter ``t = (s - s_mid) / h_e`` runs from -1/2 at ``start``
    to +1/2 at ``end``.
    """

    start: FloatArray
    end: FloatArray
    degree: int

    @property
    def size(self) -> int:
        return self.degree + 1

    @property
    def length(self) -> float:
        return float(np.hypot(*(np.asarray(self.end) - np.asarray(self.start))))

    @property
    def midpoint(self) -> FloatArray:
        return 0.5 * (np.asarray(self.start, float) + np.asarray(self.end, float))

    def points(self, t: ArrayLike) -> FloatArray:
        t = np.asarray(t, dtype=float)
        direction = np.asarray(self.end, float) - np.asarray(self.start, float)
        return self.midpoint + t[:, None] * direction

    def values(self, t: ArrayLike) -> FloatArray:
        t = np.asarray(t, dtype=float)
        return t[:, None] ** np.arange(self.size)


@lru_cache(maxsize=8)
def edge_trace_inverse(k: int) -> FloatArray:
    """
    Inverse of the degree-k edge interpolation system.

    Rows of the system are the value at t = -1/2, the value at t = +1/2 and
    the moments against t**i (i <= k-2) on [-1/2, 1/2]; columns are the
    edge monomials t**j. Multiplying the returned matrix by
    ``[v(start), v(end), mu_0, ..., mu_{k-2}]`` gives the trace coefficients.
    """
    powers = np.arange(k + 1)
    rows = [(-0.5) ** powers, 0.5**powers]
    for i in range(k - 1):
        p = i + powers + 1
        rows.append((0.5**p - (-0.5) ** p) / p)
    inverse = np.linalg.inv(np.array(rows))
    inverse.setflags(write=False)
    return inverse


@dataclass(frozen=True)
class PklBasis:
    """
    Generators of P_{k,l} on one cell.

    ``coefficients[i, c]`` holds component ``c`` of generator ``i`` in the
    scaled monomial basis of degree k+l-1; ``divergence[i]`` holds its
    divergence in the basis of degree k-2.
    """

    k: int
    ell: int
    basis: MonomialBasis
    coefficients: FloatArray
    divergence: FloatArray
    n_x: int

    @property
    def dimension(self) -> int:
        return self.coefficients.shape[0]

    def values(self, points: ArrayLike) -> FloatArray:
        """Generator values, shape (npts, dimension, 2)."""
        return np.einsum("pn,gcn->pgc", self.basis.values(points), self.coefficients)

    def flat_coefficients(self) -> FloatArray:
        return self.coefficients.reshape(self.dimension, -1)


def build_pkl_basis(center: ArrayLike, diameter: float, k: int, ell: int) -> PklBasis:
    """
    Build the P_{k,l} generators of a cell.

    Args:
        center: Cell centroid x_E
        diameter: Cell diameter h_E
        k: Polynomial degree (>= 2)
        ell: Enrichment (>= 0)

    Returns:
        PklBasis with the xi-part generators first, curl generators after
    """
    if k < 2 or ell < 0:
        raise ValueError(f"P_(k,l) needs k >= 2 and l >= 0, got k={k}, l={ell}")

    basis = MonomialBasis(center, diameter, k + ell - 1)
    pos = index_map(k + ell - 1)
    low = multi_indices(k - 2)
    top = multi_indices(k + ell)[1:]

    coefficients = np.zeros((len(low) + len(top), 2, basis.size))
    divergence = np.zeros((len(low) + len(top), len(low)))
    for i, (a, b) in enumerate(low):
        coefficients[i, 0, pos[(a + 1, b)]] = 1.0
        coefficients[i, 1, pos[(a, b + 1)]] = 1.0
        divergence[i, i] = (2 + a + b) / diameter
    for i, (a, b) in enumerate(top, start=len(low)):
        if b > 0:
            coefficients[i, 0, pos[(a, b - 1)]] = b
        if a > 0:
            coefficients[i, 1, pos[(a - 1, b)]] = -a

    return PklBasis(
        k=k,
        ell=ell,
        basis=basis,
        coefficients=coefficients,
        divergence=divergence,
        n_x=len(low),
    )


def pkl_divergence(pkl: PklBasis, index: int) -> FloatArray:
    """Divergence of one generator in the scaled basis of degree k-2."""
    if not 0 <= index < pkl.dimension:
        raise IndexError(f"generator {index} out of range 0..{pkl.dimension - 1}")
    return pkl.divergence[index].copy()


def gradient_coordinates(pkl: PklBasis) -> FloatArray:
    """
    Coordinates of grad m_a (|a| <= k) in the P_{k,l} generators.

    Returns:
        (dimension, dim P_k) matrix ``C`` with ``grad m_a = sum_i C[i, a] g_i``
    """
    monomials = MonomialBasis(pkl.basis.center, pkl.basis.diameter, pkl.k)
    target = np.zeros((2, pkl.basis.size, monomials.size))
    for axis in (0, 1):
        derivative = monomials.derivative_matrix(axis)
        target[axis, : derivative.shape[0], :] = derivative
    coords, *_ = np.linalg.lstsq(
        pkl.flat_coefficients().T, target.reshape(-1, monomials.size), rcond=None
    )
    return coords

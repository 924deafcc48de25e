"""
Generalized eigenvalue and linear solves for the assembled pair.

Two strategies solve A x = lambda M x for the eigenvalues of smallest
modulus: a dense QZ reduction, and Arnoldi iteration on the shift-inverted
operator (A - sigma M)^-1 M backed by a sparse LU factorization. The
shift-inverted form tolerates a singular M; infinite eigenvalues it would
produce are filtered out.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg, sparse
from scipy.sparse.linalg import (
    ArpackNoConvergence,
    LinearOperator,
    SuperLU,
    eigs,
    splu,
)
from scipy.sparse.linalg import norm as sparse_norm

from .assembly import SparsePair
from .config import get_settings
from .exceptions import FactorizationError, SolverConvergenceError, SolverError
from .log import get_component_logger

logger = get_component_logger("sfvem.eigensolve")

ComplexArray = NDArray[np.complex128]

INFINITE_EIGENVALUE = 1e12
ARNOLDI_TOL = 1e-10
ARNOLDI_RESTARTS = 300
TIE_TOL = 1e-12


class Strategy(str, Enum):
    """Eigensolver strategy."""

    AUTO = "auto"
    DENSE = "dense"
    SHIFT_INVERT = "shift-invert"


@dataclass(frozen=True)
class EigenResult:
    """Eigenpairs sorted by modulus, with normalized residuals."""

    eigenvalues: ComplexArray
    eigenvectors: ComplexArray
    residuals: NDArray[np.float64]
    strategy: Strategy
    shift: complex | None = None


@dataclass(frozen=True)
class EigenCluster:
    """Consecutive eigenvalues approximating one multiple eigenvalue."""

    indices: tuple[int, ...]
    mean: complex

    @property
    def multiplicity(self) -> int:
        return len(self.indices)


def select_strategy(n_free: int) -> Strategy:
    """Dense QZ up to the configured size limit, shift-invert above it."""
    if n_free <= get_settings().dense_limit:
        return Strategy.DENSE
    return Strategy.SHIFT_INVERT


def spectral_order(values: ArrayLike) -> NDArray[np.int64]:
    """
    Indices sorting by modulus; near-equal moduli by real, then imaginary part.
    """
    values = np.asarray(values, dtype=complex)
    modulus = np.abs(values)
    order = np.argsort(modulus, kind="stable")
    result = []
    start = 0
    while start < len(order):
        stop = start + 1
        while stop < len(order) and modulus[order[stop]] - modulus[
            order[start]
        ] <= TIE_TOL * max(1.0, modulus[order[start]]):
            stop += 1
        run = order[start:stop]
        result.extend(run[np.lexsort((values[run].imag, values[run].real))])
        start = stop
    return np.array(result, dtype=np.int64)


def _residuals(
    pair: SparsePair, values: ComplexArray, vectors: ComplexArray
) -> NDArray[np.float64]:
    norm_a = sparse_norm(pair.A)
    ax = pair.A @ vectors
    mx = pair.M @ vectors
    numerator = np.linalg.norm(ax - mx * values[None, :], axis=0)
    return numerator / (norm_a * np.linalg.norm(vectors, axis=0))


def _dense(pair: SparsePair) -> tuple[ComplexArray, ComplexArray]:
    try:
        values, vectors = linalg.eig(pair.A.toarray(), pair.M.toarray())
    except linalg.LinAlgError as e:
        raise SolverError(f"QZ reduction failed: {e}") from e
    return values, vectors


def _factorize(matrix: sparse.spmatrix) -> SuperLU:
    try:
        return splu(sparse.csc_matrix(matrix))
    except RuntimeError as e:
        raise FactorizationError(f"sparse factorization failed: {e}") from e


def _shift_invert(
    pair: SparsePair, nev: int, shift: complex
) -> tuple[ComplexArray, ComplexArray, complex]:
    a, m = pair.A.tocsc(), pair.M.tocsc()
    try:
        lu = _factorize(a - shift * m)
    except FactorizationError:
        perturbed = shift + 1e-3 * sparse_norm(a) / sparse_norm(m)
        logger.warning(
            "Singular shifted matrix, retrying",
            shift=str(shift),
            perturbed=str(perturbed),
        )
        shift = perturbed
        lu = _factorize(a - shift * m)

    n = pair.size
    operator = LinearOperator(
        (n, n),
        matvec=lambda x: lu.solve(np.asarray(m @ x, dtype=complex)),
        dtype=complex,
    )
    ncv = min(max(2 * nev + 10, 30), n)
    try:
        theta, vectors = eigs(
            operator,
            k=nev,
            which="LM",
            ncv=ncv,
            tol=ARNOLDI_TOL,
            maxiter=ARNOLDI_RESTARTS,
            v0=np.ones(n, dtype=complex),
        )
    except ArpackNoConvergence as e:
        partial = shift + 1.0 / np.asarray(e.eigenvalues, dtype=complex)
        residuals = _residuals(pair, partial, np.asarray(e.eigenvectors, dtype=complex))
        raise SolverConvergenceError(
            f"Arnoldi iteration stopped with {len(partial)} of {nev} eigenpairs",
            residuals=residuals.tolist(),
        ) from e
    return shift + 1.0 / theta, vectors, shift


def solve_gevp(
    pair: SparsePair,
    nev: int,
    strategy: Strategy | str = Strategy.AUTO,
    shift: complex = 1.0,
) -> EigenResult:
    """
    Eigenpairs of smallest modulus of A x = lambda M x.

    Args:
        pair: Assembled matrices on the free DOFs
        nev: Number of eigenpairs
        strategy: auto, dense or shift-invert
        shift: Shift sigma of the shift-invert strategy

    Returns:
        EigenResult sorted by modulus

    Raises:
        FactorizationError: A - sigma M singular at sigma and its perturbation
        SolverConvergenceError: Arnoldi did not converge, or a residual
            exceeds the configured tolerance
    """
    n = pair.size
    if nev < 1 or nev > n:
        raise SolverError(f"nev must be in 1..{n}, got {nev}")
    strategy = Strategy(strategy)
    if strategy is Strategy.AUTO:
        strategy = select_strategy(n)
    if strategy is Strategy.SHIFT_INVERT and nev >= n - 1:
        logger.info("Too few DOFs for Arnoldi, using QZ", n=n, nev=nev)
        strategy = Strategy.DENSE

    used_shift: complex | None = None
    if strategy is Strategy.DENSE:
        values, vectors = _dense(pair)
    else:
        values, vectors, used_shift = _shift_invert(pair, nev, shift)

    finite = np.isfinite(values) & (np.abs(values) <= INFINITE_EIGENVALUE)
    values, vectors = values[finite], vectors[:, finite]
    if len(values) < nev:
        raise SolverError(f"only {len(values)} finite eigenvalues, {nev} requested")
    order = spectral_order(values)[:nev]
    values, vectors = values[order], vectors[:, order]

    residuals = _residuals(pair, values, vectors)
    tol = get_settings().residual_tol
    if np.any(residuals > tol):
        raise SolverConvergenceError(
            f"eigenpair residuals above {tol:g}", residuals=residuals.tolist()
        )

    logger.info(
        "Eigenproblem solved",
        strategy=strategy.value,
        n=n,
        nev=nev,
        smallest=str(values[0]),
        max_residual=float(residuals.max()),
    )
    return EigenResult(
        eigenvalues=values,
        eigenvectors=vectors,
        residuals=residuals,
        strategy=strategy,
        shift=used_shift,
    )


def solve_adjoint_gevp(
    pair: SparsePair,
    nev: int,
    strategy: Strategy | str = Strategy.AUTO,
    shift: complex = 1.0,
) -> EigenResult:
    """Left eigenpairs: eigenpairs of the conjugate-transposed pair."""
    return solve_gevp(pair.adjoint(), nev, strategy, np.conj(shift))


def cluster_eigenvalues(values: ArrayLike, tol: float) -> list[EigenCluster]:
    """
    Greedy clustering of modulus-sorted values.

    A value joins the current cluster when it is within ``tol`` (relative)
    of the running cluster mean, so a chain of small steps cannot drift.
    """
    values = np.asarray(values, dtype=complex)
    clusters: list[EigenCluster] = []
    members: list[int] = []
    for i, value in enumerate(values):
        if members:
            mean = complex(values[members].mean())
            if abs(value - mean) > tol * abs(mean):
                clusters.append(EigenCluster(tuple(members), mean))
                members = []
        members.append(i)
    if members:
        clusters.append(EigenCluster(tuple(members), complex(values[members].mean())))
    return clusters


def solve_linear(matrix: sparse.spmatrix, rhs: ArrayLike) -> ComplexArray:
    """
    Sparse direct solve.

    Raises:
        FactorizationError: singular matrix
        SolverError: relative residual above the configured tolerance
    """
    rhs = np.asarray(rhs)
    dtype = np.result_type(matrix.dtype, rhs.dtype, np.float64)
    matrix = sparse.csc_matrix(matrix, dtype=dtype)
    solution = _factorize(matrix).solve(rhs.astype(dtype))

    scale = np.linalg.norm(rhs)
    residual = np.linalg.norm(matrix @ solution - rhs)
    relative = residual / scale if scale > 0 else residual
    if relative > get_settings().linear_residual_tol:
        raise SolverError(f"linear solve residual {relative:.3e} above tolerance")
    logger.debug("Linear system solved", n=matrix.shape[0], residual=float(relative))
    return solution

"""
Local and global matrices of the SFVEM and SVEM discretizations.

The global pair (A, M) collects

    A: (K Pi_P grad u, Pi_P grad v) + (beta . Pi0_{k-1} grad u, Pi0_k v)
       + (gamma Pi0_k u, Pi0_k v)
    M: (Pi0_k u, Pi0_k v)

over the cells, with the SVEM variant replacing the first term by
(K Pi0_{k-1} grad u, Pi0_{k-1} grad v) plus a dofi-dofi stabilization.
Dirichlet DOFs (boundary vertices and boundary edges) are eliminated.
"""

import math
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import sparse
from scipy.linalg import svdvals

from .config import get_settings
from .exceptions import ElementError, OutputError, ProblemSpecError
from .log import get_component_logger
from .mesh.geometry import PolygonMesh
from .polybasis import polynomial_dimension
from .projection import DofLayout, ElementProjections, compute_element_projections

logger = get_component_logger("sfvem.assembly")

FloatArray = NDArray[np.float64]
ComplexArray = NDArray[np.complex128]
ScalarField = Callable[[FloatArray], ArrayLike]

ELL_TABLE = {4: 1, 5: 2, 8: 3}
KERNEL_TOL = 1e-10
MAX_ELL_RAISE = 4


class Scheme(str, Enum):
    """Discretization scheme."""

    SFVEM = "sfvem"
    SVEM = "svem"


def default_ell_rule(n_vertices: int) -> int:
    """l for a cell with ``n_vertices`` vertices (4 -> 1, 5 -> 2, 8 -> 3)."""
    return ELL_TABLE.get(n_vertices, max(1, math.ceil((n_vertices - 2) / 2)))


def _field(value: Any, points: FloatArray, shape: tuple[int, ...]) -> NDArray[Any]:
    data = value(points) if callable(value) else value
    data = np.asarray(data)
    return np.broadcast_to(data.reshape((-1, *shape)), (len(points), *shape))


@dataclass(frozen=True)
class ProblemSpec:
    """
    Coefficients and discretization choices.

    ``diffusion``, ``convection`` and ``reaction`` are constants or callables
    taking an (n, 2) array of points and returning (n, 2, 2), (n, 2) and (n,)
    arrays. ``ell`` overrides ``ell_rule`` for every cell when set.
    """

    diffusion: Any = ((1.0, 0.0), (0.0, 1.0))
    convection: Any = (0.0, 0.0)
    reaction: Any = 0.0
    k: int = 2
    ell: int | None = None
    ell_rule: Callable[[int], int] = field(default=default_ell_rule, repr=False)
    scheme: Scheme = Scheme.SFVEM
    check_kernel: bool = True

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ProblemSpecError(f"k must be >= 2, got {self.k}")
        if self.ell is not None and self.ell < 0:
            raise ProblemSpecError(f"l must be >= 0, got {self.ell}")
        object.__setattr__(self, "scheme", Scheme(self.scheme))

    def ell_for(self, n_vertices: int) -> int:
        return self.ell if self.ell is not None else self.ell_rule(n_vertices)

    @property
    def resolves_ell(self) -> bool:
        """Whether l is raised per cell until the stiffness kernel is the constants."""
        return self.ell is None and self.scheme is Scheme.SFVEM and self.check_kernel

    def diffusion_at(self, points: FloatArray) -> FloatArray:
        return _field(self.diffusion, points, (2, 2))

    def convection_at(self, points: FloatArray) -> FloatArray:
        return _field(self.convection, points, (2,))

    def reaction_at(self, points: FloatArray) -> FloatArray:
        return _field(self.reaction, points, ())

    def without_convection(self) -> "ProblemSpec":
        return replace(self, convection=(0.0, 0.0))


@dataclass(frozen=True)
class GlobalDofMap:
    """Global DOF numbering: vertices, then edges, then cell interiors."""

    k: int
    n_total: int
    cell_dofs: tuple[NDArray[np.int64], ...]
    dirichlet: NDArray[np.bool_]
    free: NDArray[np.int64]

    @property
    def n_free(self) -> int:
        return len(self.free)

    @classmethod
    def build(cls, mesh: PolygonMesh, k: int) -> "GlobalDofMap":
        per_edge = k - 1
        per_cell = polynomial_dimension(k - 2)
        edge_offset = mesh.n_vertices
        cell_offset = edge_offset + mesh.n_edges * per_edge
        n_total = cell_offset + mesh.n_cells * per_cell

        cell_dofs = []
        for c, cell in enumerate(mesh.cells):
            local_edges = mesh.cell_edges[c][:, None]
            edge_part = (
                edge_offset + local_edges * per_edge + np.arange(per_edge)
            ).ravel()
            interior = cell_offset + c * per_cell + np.arange(per_cell)
            dofs = np.concatenate([cell, edge_part, interior])
            cell_dofs.append(dofs.astype(np.int64))

        dirichlet = np.zeros(n_total, dtype=bool)
        dirichlet[: mesh.n_vertices] = mesh.boundary_vertex
        dirichlet[edge_offset:cell_offset] = np.repeat(mesh.boundary_edge, per_edge)
        return cls(
            k=k,
            n_total=n_total,
            cell_dofs=tuple(cell_dofs),
            dirichlet=dirichlet,
            free=np.flatnonzero(~dirichlet),
        )

    def expand(self, values: ArrayLike) -> ComplexArray:
        """Full DOF vector from free values (zeros on the boundary)."""
        values = np.asarray(values)
        full = np.zeros((self.n_total, *values.shape[1:]), dtype=complex)
        full[self.free] = values
        return full


@dataclass(frozen=True)
class SparsePair:
    """Global matrices restricted to free DOFs."""

    A: sparse.csr_matrix
    M: sparse.csr_matrix

    @property
    def size(self) -> int:
        return int(self.A.shape[0])

    def adjoint(self) -> "SparsePair":
        """Conjugate-transposed pair of the discrete adjoint problem."""
        return SparsePair(A=self.A.conj().T.tocsr(), M=self.M.conj().T.tocsr())


@dataclass(frozen=True)
class LocalForms:
    """Local matrices of one cell, indexed (test, trial)."""

    stiffness: FloatArray
    convection: FloatArray
    reaction: FloatArray
    mass: FloatArray

    @property
    def A(self) -> FloatArray:
        return self.stiffness + self.convection + self.reaction


def _check_coefficients(diffusion: FloatArray, reaction: FloatArray, cell: int) -> None:
    if not np.allclose(diffusion, np.swapaxes(diffusion, 1, 2), rtol=1e-12, atol=0):
        raise ProblemSpecError(f"cell {cell}: diffusion tensor is not symmetric")
    if np.linalg.eigvalsh(diffusion).min() <= 0:
        raise ProblemSpecError(
            f"cell {cell}: diffusion tensor is not positive definite"
        )
    if np.any(np.real(reaction) < 0):
        raise ProblemSpecError(f"cell {cell}: reaction coefficient is negative")


def _gradient_projection_values(projections: ElementProjections) -> FloatArray:
    """Values (npts, ndof, 2) of Pi0_{k-1} grad of the local basis functions."""
    quad = projections.quad
    n_low = polynomial_dimension(projections.layout.k - 1)
    low = quad.basis.values(quad.rule.points)[:, :n_low]
    grad = projections.pi_zero_grad
    return np.stack([low @ grad[:n_low], low @ grad[n_low:]], axis=-1)


def svem_local_stiffness(
    projections: ElementProjections, spec: ProblemSpec
) -> FloatArray:
    """
    Stabilized stiffness: projected-gradient consistency plus
    ``max|K| * (I - D Pi_nabla)^T (I - D Pi_nabla)``.
    """
    rule = projections.quad.rule
    diffusion = spec.diffusion_at(rule.points)
    grads = _gradient_projection_values(projections)
    consistency = np.einsum("q,qic,qcd,qjd->ij", rule.weights, grads, diffusion, grads)
    scale = float(np.linalg.norm(diffusion, ord=2, axis=(1, 2)).max())
    residual = np.eye(projections.layout.size) - projections.d @ projections.pi_nabla
    return consistency + scale * residual.T @ residual


def _sfvem_stiffness(projections: ElementProjections, spec: ProblemSpec) -> FloatArray:
    rule = projections.quad.rule
    diffusion = spec.diffusion_at(rule.points)
    pkl = projections.pi_p_grad
    frame = np.einsum("pgc,gh->phc", projections.pkl.values(rule.points), pkl.change)
    gram = np.einsum("q,qac,qcd,qbd->ab", rule.weights, frame, diffusion, frame)
    return pkl.orthonormal.T @ gram @ pkl.orthonormal


def local_forms(projections: ElementProjections, spec: ProblemSpec) -> LocalForms:
    """
    Local stiffness, convection, reaction and mass matrices of one cell.

    Raises:
        ProblemSpecError: coefficients invalid at the cell quadrature points
    """
    quad = projections.quad
    points, weights = quad.rule.points, quad.rule.weights
    _check_coefficients(
        spec.diffusion_at(points), spec.reaction_at(points), projections.cell.index
    )

    if spec.scheme is Scheme.SVEM:
        stiffness = svem_local_stiffness(projections, spec)
    else:
        stiffness = _sfvem_stiffness(projections, spec)

    projected = quad.basis.values(points) @ projections.pi_zero
    grads = _gradient_projection_values(projections)
    beta = spec.convection_at(points)
    advective = np.einsum("qc,qjc->qj", beta, grads)
    convection = projected.T @ (weights[:, None] * advective)
    reaction = projected.T @ ((weights * spec.reaction_at(points))[:, None] * projected)
    mass = projections.pi_zero.T @ quad.mass @ projections.pi_zero
    return LocalForms(
        stiffness=stiffness, convection=convection, reaction=reaction, mass=mass
    )


def kernel_dimension(matrix: FloatArray, tol: float = KERNEL_TOL) -> int:
    """Number of singular values below ``tol`` times the largest."""
    values = svdvals(matrix)
    return int(np.count_nonzero(values <= tol * values[0]))


def gradient_kernel_dimension(element: ElementProjections) -> int:
    """Kernel dimension of the P_{k,l} gradient projection (the K = I stiffness)."""
    coords = element.pi_p_grad.orthonormal
    return kernel_dimension(coords.T @ coords)


def resolve_cell_projections(
    layout: DofLayout, ell: int, max_raise: int = MAX_ELL_RAISE
) -> ElementProjections:
    """
    Projections with the smallest l >= ``ell`` whose gradient projection only
    loses the constants.

    Stops after ``max_raise`` increments and returns the last attempt; the
    assembly kernel check then reports the cell.
    """
    element = compute_element_projections(layout, ell)
    for _ in range(max_raise):
        if gradient_kernel_dimension(element) <= 1:
            break
        ell += 1
        logger.debug("Raising l", cell=layout.cell.index, ell=ell)
        element = compute_element_projections(layout, ell)
    return element


def compute_projections(
    mesh: PolygonMesh, spec: ProblemSpec, workers: int | None = None
) -> list[ElementProjections]:
    """
    Projector matrices of every cell, in cell order.

    With the default l rule on the SFVEM scheme, l starts from the rule's
    value and is raised per cell to the smallest value that fills the
    gradient kernel.
    """

    def one(c: int) -> ElementProjections:
        layout = DofLayout.for_cell(mesh, c, spec.k)
        ell = spec.ell_for(len(mesh.cells[c]))
        if spec.resolves_ell:
            return resolve_cell_projections(layout, ell)
        return compute_element_projections(layout, ell)

    workers = workers or get_settings().assembly_workers
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            projections = list(pool.map(one, range(mesh.n_cells)))
    else:
        projections = [one(c) for c in range(mesh.n_cells)]

    if spec.resolves_ell:
        raised = [
            e.cell.index
            for e in projections
            if e.ell > spec.ell_for(e.layout.n_vertices)
        ]
        if raised:
            logger.warning(
                "Raised l above the default rule",
                k=spec.k,
                cells=len(raised),
                first=raised[0],
                max_ell=max(e.ell for e in projections),
            )
    return projections


def assemble(
    mesh: PolygonMesh,
    spec: ProblemSpec,
    projections: list[ElementProjections] | None = None,
) -> tuple[SparsePair, GlobalDofMap]:
    """
    Assemble (A, M) on the free DOFs.

    Args:
        mesh: Validated mesh
        spec: Coefficients, degree and scheme
        projections: Precomputed per-cell projectors (computed when omitted)

    Returns:
        (SparsePair, GlobalDofMap)

    Raises:
        ElementError: a local projector failed or an SFVEM local stiffness has
            more than the constants in its kernel
    """
    dofmap = GlobalDofMap.build(mesh, spec.k)
    if projections is None:
        projections = compute_projections(mesh, spec)

    rows, cols, a_data, m_data = [], [], [], []
    for c, element in enumerate(projections):
        forms = local_forms(element, spec)
        if spec.scheme is Scheme.SFVEM and spec.check_kernel:
            dim = kernel_dimension(forms.stiffness)
            if dim > 1:
                raise ElementError(
                    f"local stiffness kernel has dimension {dim}; increase l",
                    cell_id=c,
                )
        idx = dofmap.cell_dofs[c]
        rr, cc = np.meshgrid(idx, idx, indexing="ij")
        rows.append(rr.ravel())
        cols.append(cc.ravel())
        a_data.append(forms.A.ravel())
        m_data.append(forms.mass.ravel())

    shape = (dofmap.n_total, dofmap.n_total)
    rows_all, cols_all = np.concatenate(rows), np.concatenate(cols)
    a_full = sparse.coo_matrix(
        (np.concatenate(a_data).astype(complex), (rows_all, cols_all)), shape=shape
    ).tocsr()
    m_full = sparse.coo_matrix(
        (np.concatenate(m_data).astype(complex), (rows_all, cols_all)), shape=shape
    ).tocsr()
    free = dofmap.free
    pair = SparsePair(A=a_full[free][:, free], M=m_full[free][:, free])

    logger.info(
        "Assembled pair",
        scheme=spec.scheme.value,
        k=spec.k,
        cells=mesh.n_cells,
        ndof=dofmap.n_total,
        free=dofmap.n_free,
        nnz=int(pair.A.nnz),
    )
    return pair, dofmap


def interpolate(
    dofmap: GlobalDofMap,
    projections: list[ElementProjections],
    u: ScalarField,
) -> ComplexArray:
    """Full DOF vector of the interpolant of ``u``."""
    full = np.zeros(dofmap.n_total, dtype=complex)
    for element, idx in zip(projections, dofmap.cell_dofs, strict=True):
        layout, quad = element.layout, element.quad
        local = np.empty(layout.size, dtype=complex)
        local[: layout.n_vertices] = np.asarray(u(layout.cell.vertices))
        for j, edge_rule in enumerate(quad.edge_rules):
            length = edge_rule.weights.sum()
            moments = edge_rule.params[:, None] ** np.arange(layout.k - 1)
            local[layout.edge_dofs(j)] = moments.T @ (
                edge_rule.weights / length * np.asarray(u(edge_rule.points))
            )
        low = quad.basis.values(quad.rule.points)[:, : layout.n_interior]
        local[layout.interior_dofs] = low.T @ (
            quad.rule.weights * np.asarray(u(quad.rule.points))
        ) / layout.cell.area
        full[idx] = local
    return full


def assemble_source_rhs(
    dofmap: GlobalDofMap,
    projections: list[ElementProjections],
    f: ScalarField,
) -> ComplexArray:
    """Load vector (f, Pi0_k v) on the free DOFs."""
    full = np.zeros(dofmap.n_total, dtype=complex)
    for element, idx in zip(projections, dofmap.cell_dofs, strict=True):
        quad = element.quad
        projected = quad.basis.values(quad.rule.points) @ element.pi_zero
        values = np.asarray(f(quad.rule.points))
        full[idx] += projected.T @ (quad.rule.weights * values)
    return full[dofmap.free]


def export_pair(pair: SparsePair, directory: str | Path) -> tuple[Path, Path]:
    """
    Write A and M as ``i j re im`` lines (0-based).

    Raises:
        OutputError: the directory cannot be written
    """
    directory = Path(directory)
    paths = (directory / "A.txt", directory / "M.txt")
    try:
        directory.mkdir(parents=True, exist_ok=True)
        for matrix, path in zip((pair.A, pair.M), paths, strict=True):
            coo = matrix.tocoo()
            lines = [
                f"{i} {j} {v.real!r} {v.imag!r}"
                for i, j, v in zip(coo.row, coo.col, coo.data.tolist(), strict=True)
            ]
            path.write_text("\n".join(lines) + "\n")
    except OSError as e:
        raise OutputError(f"cannot export matrices to {directory}: {e}") from e
    logger.info("Pair exported", directory=str(directory), size=pair.size)
    return paths

"""
Convergence studies for the eigenvalue and source problems.

Each level generates a mesh, assembles the pair for one scheme, solves, and
records errors against the closed-form reference. A failing level is
recorded on the report and ends that scheme's series.
"""

import math
from collections.abc import Callable, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import stats

from ..assembly import (
    GlobalDofMap,
    ProblemSpec,
    Scheme,
    ScalarField,
    assemble,
    assemble_source_rhs,
    compute_projections,
)
from ..config import get_settings
from ..eigensolve import EigenResult, cluster_eigenvalues, solve_gevp, solve_linear
from ..exceptions import SfvemError, StudyError
from ..log import get_component_logger
from ..mesh import FamilyTag, generate_mesh, mesh_size
from ..models.study import (
    CaseName,
    ConvergenceReport,
    ConvergenceRow,
    EigenfunctionRow,
    SourceRow,
    StudyConfig,
)
from ..projection import ElementProjections
from .cases import (
    ExactEigenvalue,
    exact_eigenfunction,
    exact_reference,
    expand_reference,
    get_case,
    manufactured_problem,
)

logger = get_component_logger("sfvem.study")

VectorField = Callable[[NDArray[np.float64]], ArrayLike]


def observed_rates(hs: Sequence[float], errors: Sequence[float]) -> list[float | None]:
    """
    log(e_i / e_{i+1}) / log(h_i / h_{i+1}) between consecutive levels.

    The first level, and any interval with a non-positive error, has no rate.
    An empty series has no rates.
    """
    rates: list[float | None] = [None] if len(errors) else []
    for i in range(1, len(errors)):
        if errors[i - 1] <= 0 or errors[i] <= 0 or hs[i - 1] == hs[i]:
            rates.append(None)
            continue
        rates.append(
            math.log(errors[i - 1] / errors[i]) / math.log(hs[i - 1] / hs[i])
        )
    return rates


def fitted_slope(
    hs: Sequence[float], errors: Sequence[float], last: int | None = None
) -> float:
    """Least-squares slope of log(error) against log(h) over the last levels."""
    points = [(h, e) for h, e in zip(hs, errors, strict=True) if e > 0]
    if last is not None:
        points = points[-last:]
    if len(points) < 2:
        raise StudyError("a slope needs at least two positive errors")
    h, e = np.array(points).T
    return float(stats.linregress(np.log(h), np.log(e)).slope)


def compute_error_norms(
    solution: ArrayLike,
    u: ScalarField,
    grad_u: VectorField,
    dofmap: GlobalDofMap,
    projections: Sequence[ElementProjections],
    spec: ProblemSpec,
) -> tuple[float, float]:
    """
    L2 error of Pi0_k u_h and energy error of Pi_P grad u_h.

    Args:
        solution: Full DOF vector (boundary DOFs included)
        u: Exact solution
        grad_u: Exact gradient, (n, 2) values
        dofmap: DOF numbering of ``solution``
        projections: Per-cell projectors of the mesh
        spec: Supplies the diffusion tensor of the energy norm

    Returns:
        (||u - Pi0_k u_h||_0, ||sqrt(K) (grad u - Pi_P grad u_h)||_0)
    """
    solution = np.asarray(solution)
    l2 = 0.0
    energy = 0.0
    for element, idx in zip(projections, dofmap.cell_dofs, strict=True):
        rule = element.quad.rule
        local = solution[idx]
        diff = np.asarray(u(rule.points)) - element.pi_zero_values(local)
        l2 += float(rule.weights @ np.abs(diff) ** 2)

        grad_diff = np.asarray(grad_u(rule.points)) - element.pi_p_grad_values(local)
        diffusion = spec.diffusion_at(rule.points)
        flux = np.einsum("qcd,qd->qc", diffusion, grad_diff)
        density = np.real(np.sum(np.conj(grad_diff) * flux, axis=1))
        energy += float(rule.weights @ density)
    return math.sqrt(l2), math.sqrt(max(energy, 0.0))


def _projected_inner(
    solution: NDArray[np.complex128],
    u: ScalarField,
    dofmap: GlobalDofMap,
    projections: Sequence[ElementProjections],
) -> tuple[complex, float, float]:
    """(u, Pi0 u_h), ||Pi0 u_h||^2 and ||u||^2 by cell quadrature."""
    inner, norm_h, norm_u = 0j, 0.0, 0.0
    for element, idx in zip(projections, dofmap.cell_dofs, strict=True):
        rule = element.quad.rule
        projected = element.pi_zero_values(solution[idx])
        exact = np.asarray(u(rule.points))
        inner += complex(rule.weights @ (np.conj(exact) * projected))
        norm_h += float(rule.weights @ np.abs(projected) ** 2)
        norm_u += float(rule.weights @ np.abs(exact) ** 2)
    return inner, norm_h, norm_u


def eigenfunction_errors(
    case: CaseName,
    result: EigenResult,
    reference: list[ExactEigenvalue],
    dofmap: GlobalDofMap,
    projections: Sequence[ElementProjections],
    spec: ProblemSpec,
    nev: int,
) -> list[tuple[int, float, float]]:
    """
    (eigenvalue index, L2 error, energy error) for simple exact eigenvalues.

    The discrete eigenvector is rotated so that its inner product with the
    exact eigenfunction is real and positive, then scaled to the exact L2 norm.
    """
    errors = []
    for j, (_, group) in enumerate(expand_reference(reference)[:nev]):
        if group.multiplicity != 1:
            continue
        u, grad = exact_eigenfunction(case, group.modes[0])
        vector = dofmap.expand(result.eigenvectors[:, j])
        inner, norm_h, norm_u = _projected_inner(vector, u, dofmap, projections)
        if abs(inner) == 0 or norm_h == 0:
            raise StudyError(f"eigenvector {j + 1} is orthogonal to the exact mode")
        vector *= np.conj(inner) / abs(inner) * math.sqrt(norm_u / norm_h)
        l2, energy = compute_error_norms(vector, u, grad, dofmap, projections, spec)
        errors.append((j + 1, l2, energy))
    return errors


def clustering_tolerance(h: float, k: int) -> float:
    """Relative tolerance for detecting discrete multiplicities at mesh size h."""
    return max(get_settings().cluster_tol, h ** (2 * k - 2))


def _eigen_level(
    config: StudyConfig,
    report: ConvergenceReport,
    n: int,
    spec: ProblemSpec,
    reference: list[ExactEigenvalue],
) -> None:
    stage = "mesh"
    try:
        mesh = generate_mesh(config.mesh_family, n)
        h = mesh_size(mesh)
        stage = "assembly"
        projections = compute_projections(mesh, spec)
        pair, dofmap = assemble(mesh, spec, projections)
        stage = "solve"
        nev_solve = sum(group.multiplicity for group in reference)
        if nev_solve > pair.size:
            raise StudyError(
                f"{pair.size} free DOFs cannot resolve {nev_solve} eigenvalues"
            )
        result = solve_gevp(pair, nev_solve)
        stage = "errors"
        eigfun = []
        if config.eigfun_errors:
            eigfun = eigenfunction_errors(
                config.case, result, reference, dofmap, projections, spec, config.nev
            )
    except SfvemError as e:
        logger.error("Study level failed", level=n, stage=stage, error=str(e))
        report.failure(n, stage, str(e))
        raise

    values = result.eigenvalues
    clusters = cluster_eigenvalues(values, clustering_tolerance(h, config.k))
    detected = {
        i: cluster.multiplicity for cluster in clusters for i in cluster.indices
    }
    for j, (first, group) in enumerate(expand_reference(reference)[: config.nev]):
        mean = complex(values[first : first + group.multiplicity].mean())
        report.rows.append(
            ConvergenceRow(
                level=n,
                h=h,
                ndof=pair.size,
                eig_index=j + 1,
                lambda_re=float(values[j].real),
                lambda_im=float(values[j].imag),
                abs_error=abs(mean - group.value),
                multiplicity=detected[j],
            )
        )
    for index, l2, energy in eigfun:
        report.eigfun_rows.append(
            EigenfunctionRow(
                level=n,
                h=h,
                ndof=pair.size,
                eig_index=index,
                l2_error=l2,
                energy_error=energy,
            )
        )
    logger.info(
        "Study level done",
        case=config.case.value,
        scheme=spec.scheme.value,
        level=n,
        h=h,
        ndof=pair.size,
        error=report.rows[-config.nev].abs_error,
    )


def _fill_eigen_rates(report: ConvergenceReport, nev: int) -> None:
    for index in range(1, nev + 1):
        rows = [row for row in report.rows if row.eig_index == index]
        rates = observed_rates([r.h for r in rows], [r.abs_error for r in rows])
        for row, rate in zip(rows, rates, strict=True):
            row.rate = rate


def run_convergence(
    config: StudyConfig, scheme: Scheme | str | None = None
) -> ConvergenceReport:
    """
    Eigenvalue convergence series of one scheme.

    Args:
        config: Study configuration (a coefficient case)
        scheme: Scheme to run; the first configured one when omitted

    Returns:
        ConvergenceReport with one row per level and eigenvalue index;
        failures recorded on the report
    """
    if config.is_source_study:
        raise StudyError("the manufactured case is a source study")
    scheme = Scheme(scheme) if scheme is not None else config.schemes[0]
    report = ConvergenceReport(
        case=config.case, family=config.family, k=config.k, scheme=scheme
    )
    spec = get_case(config.case).problem_spec(config.k, scheme, config.ell)
    reference = exact_reference(config.case, config.nev)

    logger.info(
        "Convergence study started",
        case=config.case.value,
        family=config.family.value,
        k=config.k,
        scheme=scheme.value,
        levels=config.levels,
    )
    for n in config.levels:
        try:
            _eigen_level(config, report, n, spec, reference)
        except SfvemError:
            break
    _fill_eigen_rates(report, config.nev)
    return report


def run_source_study(
    config: StudyConfig, scheme: Scheme | str | None = None
) -> ConvergenceReport:
    """
    Manufactured source problem series of one scheme.

    Solves the discrete source problem with u = sin(pi x) sin(pi y) and the
    load of ``config.base_case`` on every level.
    """
    if not config.is_source_study:
        raise StudyError(f"{config.case.value} is not a source study")
    scheme = Scheme(scheme) if scheme is not None else config.schemes[0]
    problem = manufactured_problem(config.base_case)
    spec = problem.base.problem_spec(config.k, scheme, config.ell)
    report = ConvergenceReport(
        case=config.case, family=config.family, k=config.k, scheme=scheme
    )

    for n in config.levels:
        stage = "mesh"
        try:
            mesh = generate_mesh(config.mesh_family, n)
            h = mesh_size(mesh)
            stage = "assembly"
            projections = compute_projections(mesh, spec)
            pair, dofmap = assemble(mesh, spec, projections)
            rhs = assemble_source_rhs(dofmap, projections, problem.f)
            stage = "solve"
            solution = dofmap.expand(solve_linear(pair.A, rhs))
            stage = "errors"
            l2, energy = compute_error_norms(
                solution, problem.u, problem.grad, dofmap, projections, spec
            )
        except SfvemError as e:
            logger.error("Study level failed", level=n, stage=stage, error=str(e))
            report.failure(n, stage, str(e))
            break
        report.source_rows.append(
            SourceRow(level=n, h=h, ndof=pair.size, l2_error=l2, energy_error=energy)
        )
        logger.info("Study level done", level=n, h=h, l2=l2, energy=energy)

    hs = [row.h for row in report.source_rows]
    l2_rates = observed_rates(hs, [row.l2_error for row in report.source_rows])
    energy_rates = observed_rates(hs, [row.energy_error for row in report.source_rows])
    for row, l2_rate, energy_rate in zip(
        report.source_rows, l2_rates, energy_rates, strict=True
    ):
        row.l2_rate = l2_rate
        row.energy_rate = energy_rate
    return report


def run_study(config: StudyConfig) -> list[ConvergenceReport]:
    """One report per configured scheme."""
    runner = run_source_study if config.is_source_study else run_convergence
    return [runner(config, scheme) for scheme in config.schemes]


def run_comparison(
    case: CaseName | str,
    families: Sequence[FamilyTag | str],
    k: int,
    levels: Sequence[int],
    nev: int = 1,
    delta: float | None = None,
) -> list[ConvergenceReport]:
    """SFVEM and SVEM series on the same meshes, per family."""
    reports = []
    for family in families:
        config = StudyConfig(
            case=CaseName(case),
            family=FamilyTag(family),
            levels=list(levels),
            k=k,
            nev=nev,
            delta=delta,
            schemes=[Scheme.SFVEM, Scheme.SVEM],
        )
        reports.extend(run_study(config))
    return reports

"""
Coefficient cases, exact spectra and the manufactured source problem.

All cases have gamma = 0, a constant diagonal K and a constant beta, so the
Dirichlet eigenpairs on the unit square are separable:

    u_mn = exp(a.x) sin(m pi x) sin(n pi y),   a_i = beta_i / (2 K_ii)
    lambda_mn = K_11 m^2 pi^2 + K_22 n^2 pi^2 + sum_i beta_i^2 / (4 K_ii)
"""

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from ..assembly import ProblemSpec, Scheme
from ..exceptions import StudyError
from ..models.study import CaseName

FloatArray = NDArray[np.float64]
ExactField = Callable[[FloatArray], NDArray[np.float64]]

MAX_MODE = 64
GROUP_TOL = 1e-12


@dataclass(frozen=True)
class CoefficientCase:
    """Constant coefficients of one case."""

    name: CaseName
    diffusion: tuple[tuple[float, float], tuple[float, float]]
    convection: tuple[float, float]
    reaction: float = 0.0

    def problem_spec(
        self, k: int, scheme: Scheme | str = Scheme.SFVEM, ell: int | None = None
    ) -> ProblemSpec:
        return ProblemSpec(
            diffusion=self.diffusion,
            convection=self.convection,
            reaction=self.reaction,
            k=k,
            ell=ell,
            scheme=Scheme(scheme),
        )

    @property
    def is_separable(self) -> bool:
        return self.diffusion[0][1] == 0.0 and self.diffusion[1][0] == 0.0


CASES = {
    CaseName.CASE1: CoefficientCase(
        CaseName.CASE1, ((1.0, 0.0), (0.0, 1.0)), (1.0, 0.0)
    ),
    CaseName.CASE2: CoefficientCase(
        CaseName.CASE2, ((1.0, 0.0), (0.0, 1.0)), (10.0, 0.0)
    ),
    CaseName.CASE3: CoefficientCase(
        CaseName.CASE3, ((8e-3, 0.0), (0.0, 1.0)), (0.0, 0.0)
    ),
    CaseName.LAPLACE: CoefficientCase(
        CaseName.LAPLACE, ((1.0, 0.0), (0.0, 1.0)), (0.0, 0.0)
    ),
}


def get_case(name: CaseName | str) -> CoefficientCase:
    """
    Coefficients of a named case.

    Raises:
        StudyError: unknown name, or the manufactured problem (which has no
            coefficients of its own)
    """
    try:
        case = CaseName(name)
    except ValueError as e:
        raise StudyError(f"unknown case {name!r}") from e
    if case not in CASES:
        raise StudyError(f"{case.value} has no coefficient set; use its base case")
    return CASES[case]


@dataclass(frozen=True)
class ExactEigenvalue:
    """An exact eigenvalue with its multiplicity and (m, n) modes."""

    value: float
    multiplicity: int
    modes: tuple[tuple[int, int], ...]


def exact_reference(case: CaseName | str, nev: int = 5) -> list[ExactEigenvalue]:
    """
    Leading exact eigenvalues, grouped by multiplicity.

    Groups are returned until they cover at least ``nev`` eigenvalue
    indices, so the last group may extend past ``nev``.

    Raises:
        StudyError: unknown case or non-separable coefficients
    """
    coeffs = get_case(case)
    if not coeffs.is_separable:
        raise StudyError(f"{coeffs.name.value} has no closed-form spectrum")
    (kx, _), (_, ky) = coeffs.diffusion
    bx, by = coeffs.convection
    shift = bx**2 / (4 * kx) + by**2 / (4 * ky)

    modes = np.arange(1, MAX_MODE + 1)
    mm, nn = np.meshgrid(modes, modes, indexing="ij")
    values = (kx * mm**2 + ky * nn**2).ravel() * np.pi**2 + shift
    order = np.lexsort((nn.ravel(), mm.ravel(), values))

    groups: list[ExactEigenvalue] = []
    covered = 0
    i = 0
    while covered < nev:
        if i >= len(order):
            raise StudyError(f"nev={nev} exceeds the tabulated modes")
        start = i
        while i < len(order) and abs(values[order[i]] - values[order[start]]) <= (
            GROUP_TOL * values[order[start]]
        ):
            i += 1
        members = order[start:i]
        groups.append(
            ExactEigenvalue(
                value=float(values[order[start]]),
                multiplicity=len(members),
                modes=tuple((int(mm.flat[p]), int(nn.flat[p])) for p in members),
            )
        )
        covered += len(members)
    return groups


def expand_reference(
    groups: list[ExactEigenvalue],
) -> list[tuple[int, ExactEigenvalue]]:
    """(first index of the group, group) for every eigenvalue index."""
    expanded = []
    first = 0
    for group in groups:
        expanded.extend([(first, group)] * group.multiplicity)
        first += group.multiplicity
    return expanded


def exact_eigenfunction(
    case: CaseName | str, mode: tuple[int, int]
) -> tuple[ExactField, ExactField]:
    """Right eigenfunction of mode (m, n) and its gradient."""
    coeffs = get_case(case)
    (kx, _), (_, ky) = coeffs.diffusion
    ax = coeffs.convection[0] / (2 * kx)
    ay = coeffs.convection[1] / (2 * ky)
    m, n = mode

    def u(points: FloatArray) -> FloatArray:
        x, y = points[:, 0], points[:, 1]
        return np.exp(ax * x + ay * y) * np.sin(m * np.pi * x) * np.sin(n * np.pi * y)

    def grad(points: FloatArray) -> FloatArray:
        x, y = points[:, 0], points[:, 1]
        weight = np.exp(ax * x + ay * y)
        sx, cx = np.sin(m * np.pi * x), np.cos(m * np.pi * x)
        sy, cy = np.sin(n * np.pi * y), np.cos(n * np.pi * y)
        return np.stack(
            [
                weight * (ax * sx + m * np.pi * cx) * sy,
                weight * sx * (ay * sy + n * np.pi * cy),
            ],
            axis=1,
        )

    return u, grad


@dataclass(frozen=True)
class ManufacturedProblem:
    """u = sin(pi x) sin(pi y) with the load of a coefficient case."""

    base: CoefficientCase
    u: ExactField
    grad: ExactField
    f: ExactField


def manufactured_problem(
    base_case: CaseName | str = CaseName.LAPLACE,
) -> ManufacturedProblem:
    """
    Manufactured source problem.

    f = -div(K grad u) + beta . grad u + gamma u for constant coefficients.
    """
    base = get_case(base_case)
    (k11, k12), (_, k22) = base.diffusion
    bx, by = base.convection
    pi = np.pi

    def u(points: FloatArray) -> FloatArray:
        return np.sin(pi * points[:, 0]) * np.sin(pi * points[:, 1])

    def grad(points: FloatArray) -> FloatArray:
        x, y = points[:, 0], points[:, 1]
        return pi * np.stack(
            [np.cos(pi * x) * np.sin(pi * y), np.sin(pi * x) * np.cos(pi * y)], axis=1
        )

    def f(points: FloatArray) -> FloatArray:
        x, y = points[:, 0], points[:, 1]
        value = u(points)
        mixed = pi**2 * np.cos(pi * x) * np.cos(pi * y)
        g = grad(points)
        return (
            (k11 + k22) * pi**2 * value
            - 2 * k12 * mixed
            + bx * g[:, 0]
            + by * g[:, 1]
            + base.reaction * value
        )

    return ManufacturedProblem(base=base, u=u, grad=grad, f=f)

"""
Tests for study cases, rates and report artifacts.
"""

import csv

import numpy as np
import pytest

from sfvem.exceptions import OutputError, StudyError
from sfvem.models.study import CaseName, StudyConfig
from sfvem.study import (
    emit_outputs,
    exact_eigenfunction,
    exact_reference,
    fitted_slope,
    get_case,
    manufactured_problem,
    observed_rates,
    plot_convergence,
    run_convergence,
    run_source_study,
    write_csv,
)
from sfvem.study.cases import expand_reference
from sfvem.study.convergence import clustering_tolerance
from sfvem.study.outputs import EIGEN_HEADER, SOURCE_HEADER
from tests.factories import build_report

pytestmark = pytest.mark.unit

PI2 = np.pi**2
POINTS = np.array([[0.2, 0.3], [0.5, 0.5], [0.71, 0.13], [0.9, 0.6]])


class TestCases:
    """Test coefficient cases and exact spectra."""

    def test_case_coefficients(self):
        """Test the tabulated K and beta of each case."""
        assert get_case("case1").convection == (1.0, 0.0)
        assert get_case("case2").convection == (10.0, 0.0)
        assert get_case("case3").diffusion == ((8e-3, 0.0), (0.0, 1.0))
        assert get_case(CaseName.LAPLACE).convection == (0.0, 0.0)

    @pytest.mark.parametrize("name", ["manufactured", "case9"])
    def test_get_case_errors(self, name):
        """Test unknown names and the manufactured problem have no coefficients."""
        with pytest.raises(StudyError):
            get_case(name)

    def test_case1_reference(self):
        """Test the leading case1 groups and multiplicities."""
        groups = exact_reference("case1", 5)
        assert [g.value for g in groups] == pytest.approx(
            [0.25 + 2 * PI2, 0.25 + 5 * PI2, 0.25 + 8 * PI2, 0.25 + 10 * PI2]
        )
        assert [g.multiplicity for g in groups] == [1, 2, 1, 2]
        assert groups[1].modes == ((1, 2), (2, 1))
        assert groups[3].modes == ((1, 3), (3, 1))

    def test_shifted_references(self):
        """Test the convection shift of case2 and the anisotropy of case3."""
        assert exact_reference("case2", 1)[0].value == pytest.approx(25.0 + 2 * PI2)
        case3 = exact_reference("case3", 5)
        assert [g.multiplicity for g in case3] == [1] * 5
        assert [g.value for g in case3] == pytest.approx(
            [(8e-3 * m**2 + 1) * PI2 for m in range(1, 6)]
        )
        assert exact_reference("laplace", 1)[0].value == pytest.approx(2 * PI2)

    def test_expand_reference(self):
        """Test each index maps to the first index of its group."""
        expanded = expand_reference(exact_reference("laplace", 5))
        assert [first for first, _ in expanded] == [0, 1, 1, 3, 4, 4]

    @pytest.mark.parametrize("case,mode", [("case1", (1, 1)), ("case2", (2, 1))])
    def test_eigenfunction_solves_pde(self, case, mode):
        """Test -div(K grad u) + beta . grad u = lambda u at interior points."""
        u, grad = exact_eigenfunction(case, mode)
        coeffs = get_case(case)
        (kx, _), (_, ky) = coeffs.diffusion
        bx, by = coeffs.convection
        m, n = mode
        lam = kx * m**2 * PI2 + ky * n**2 * PI2 + bx**2 / (4 * kx) + by**2 / (4 * ky)
        step = 1e-4
        ex, ey = np.array([step, 0.0]), np.array([0.0, step])
        uxx = (u(POINTS + ex) - 2 * u(POINTS) + u(POINTS - ex)) / step**2
        uyy = (u(POINTS + ey) - 2 * u(POINTS) + u(POINTS - ey)) / step**2
        g = grad(POINTS)
        residual = -kx * uxx - ky * uyy + bx * g[:, 0] + by * g[:, 1] - lam * u(POINTS)
        assert np.abs(residual).max() < 1e-3 * lam * np.abs(u(POINTS)).max()

    def test_boundary_values(self):
        """Test eigenfunctions vanish on the boundary."""
        u, _ = exact_eigenfunction("case1", (2, 3))
        edge = np.array([[0.0, 0.4], [1.0, 0.4], [0.4, 0.0], [0.4, 1.0]])
        assert np.abs(u(edge)).max() < 1e-14


class TestManufactured:
    """Test the manufactured source problem."""

    def test_laplace_load(self):
        """Test f = 2 pi^2 sin(pi x) sin(pi y) for the Laplacian."""
        problem = manufactured_problem("laplace")
        expected = 2 * PI2 * np.sin(np.pi * POINTS[:, 0]) * np.sin(np.pi * POINTS[:, 1])
        assert problem.f(POINTS) == pytest.approx(expected)

    def test_convection_load(self):
        """Test the case1 load adds beta . grad u."""
        problem = manufactured_problem("case1")
        x, y = POINTS[:, 0], POINTS[:, 1]
        expected = 2 * PI2 * np.sin(np.pi * x) * np.sin(np.pi * y) + np.pi * np.cos(
            np.pi * x
        ) * np.sin(np.pi * y)
        assert problem.f(POINTS) == pytest.approx(expected)


class TestRates:
    """Test observed rates and fitted slopes."""

    def test_observed_rates(self):
        """Test rates of e = 3 h^2 are 2, with none on the first level."""
        hs = [1.0, 0.5, 0.25]
        rates = observed_rates(hs, [3 * h**2 for h in hs])
        assert rates[0] is None
        assert rates[1:] == pytest.approx([2.0, 2.0])

    def test_zero_error_has_no_rate(self):
        """Test a zero error yields None."""
        assert observed_rates([1.0, 0.5], [1.0, 0.0]) == [None, None]

    def test_empty_series(self):
        """Test a series with no levels has no rates."""
        assert observed_rates([], []) == []

    def test_fitted_slope(self):
        """Test the least-squares slope of c h^p is p."""
        hs = [0.5, 0.25, 0.125, 0.0625]
        assert fitted_slope(hs, [7 * h**4 for h in hs]) == pytest.approx(4.0)
        assert fitted_slope(hs, [7 * h**3 for h in hs], last=2) == pytest.approx(3.0)

    def test_fitted_slope_needs_two_points(self):
        """Test a single positive error raises StudyError."""
        with pytest.raises(StudyError):
            fitted_slope([0.5, 0.25], [1.0, 0.0])

    def test_clustering_tolerance(self, monkeypatch):
        """Test the tolerance is max(configured, h^(2k-2))."""
        assert clustering_tolerance(0.5, 2) == pytest.approx(0.25)
        assert clustering_tolerance(0.01, 4) == pytest.approx(1e-6)
        monkeypatch.setenv("SFVEM_CLUSTER_TOL", "1e-3")
        from sfvem.config import get_settings

        get_settings.cache_clear()
        assert clustering_tolerance(0.01, 4) == pytest.approx(1e-3)


class TestOutputs:
    """Test CSV and SVG artifacts."""

    def test_eigen_csv(self, tmp_path):
        """Test header, empty first rate and parsed rate."""
        report = build_report([1e-2, 1e-2 / 16], hs=[0.5, 0.25])
        path = write_csv(report, tmp_path / "eig.csv")
        with path.open() as handle:
            rows = list(csv.reader(handle))
        assert tuple(rows[0]) == EIGEN_HEADER
        assert len(rows) == 3
        assert rows[1][-1] == ""
        assert float(rows[2][-1]) == pytest.approx(4.0)
        assert float(rows[1][1]) == 0.5

    def test_csv_is_deterministic(self, tmp_path):
        """Test identical reports give byte-identical files."""
        report = build_report([1e-2, 3e-3, 4e-4])
        first = write_csv(report, tmp_path / "a.csv").read_bytes()
        second = write_csv(report, tmp_path / "b.csv").read_bytes()
        assert first == second
        assert b"\r" not in first

    def test_source_csv(self, tmp_path):
        """Test the source table header and energy column."""
        report = build_report([1e-3, 1.25e-4], hs=[0.5, 0.25], source=True)
        path = write_csv(report, tmp_path / "src.csv")
        rows = list(csv.reader(path.open()))
        assert tuple(rows[0]) == SOURCE_HEADER
        assert float(rows[2][5]) == pytest.approx(1.25e-3)
        assert float(rows[2][4]) == pytest.approx(3.0)

    def test_svg(self, tmp_path):
        """Test the plot is written as deterministic SVG."""
        report = build_report([1e-2, 1e-3, 1e-4])
        first = plot_convergence(report, tmp_path / "a.svg").read_text()
        second = plot_convergence(report, tmp_path / "b.svg").read_text()
        assert "<svg" in first
        assert first == second

    def test_emit_outputs(self, tmp_path):
        """Test emit_outputs writes <stem>.csv and <stem>.svg."""
        report = build_report([1e-2, 1e-3])
        paths = emit_outputs(report, tmp_path / "out")
        assert paths["csv"].name == "case1_quad_k2_sfvem.csv"
        assert paths["svg"].exists()
        assert "eigfun" not in paths

    def test_empty_report(self, tmp_path):
        """Test an empty report raises OutputError."""
        with pytest.raises(OutputError):
            emit_outputs(build_report([]), tmp_path)

    def test_summary(self):
        """Test the text summary lists the stem and a dash for the first rate."""
        summary = build_report([1e-2, 1e-3]).summary()
        lines = summary.splitlines()
        assert lines[0] == "case1_quad_k2_sfvem"
        assert lines[2].rstrip().endswith("-")


class TestRunners:
    """Test study runners on coarse meshes."""

    def test_eigen_series(self):
        """Test a two-level Laplace series has decreasing errors and one rate."""
        config = StudyConfig(case="laplace", family="quad", levels=[2, 4], nev=1)
        report = run_convergence(config)
        assert not report.failed
        assert [row.level for row in report.rows] == [2, 4]
        errors = report.errors(1)
        assert errors[1] < errors[0]
        assert report.rates(1)[0] is None
        assert report.rates(1)[1] > 0
        assert report.rows[1].lambda_re == pytest.approx(2 * PI2, rel=1e-2)

    def test_failure_is_recorded(self):
        """Test too few DOFs record a solve failure and end the series."""
        config = StudyConfig(case="laplace", family="quad", levels=[1, 2], nev=5)
        report = run_convergence(config)
        assert report.rows == []
        assert report.failures[0].level == 1
        assert report.failures[0].stage == "solve"

    def test_source_series(self):
        """Test a two-level source series has decreasing L2 and energy errors."""
        config = StudyConfig(case="manufactured", family="quad", levels=[2, 4])
        report = run_source_study(config)
        first, second = report.source_rows
        assert second.l2_error < first.l2_error
        assert second.energy_error < first.energy_error
        assert first.l2_rate is None
        assert second.energy_rate > 0

    def test_wrong_runner(self):
        """Test each runner rejects the other kind of study."""
        with pytest.raises(StudyError):
            run_convergence(
                StudyConfig(case="manufactured", family="quad", levels=[2])
            )
        with pytest.raises(StudyError):
            run_source_study(StudyConfig(case="case1", family="quad", levels=[2]))

    def test_first_level_failure_keeps_report(self):
        """Test an eigen series failing on its first level returns an empty report."""
        config = StudyConfig(
            case="laplace", family="octagon", levels=[2, 4], nev=1, ell=0
        )
        report = run_convergence(config)
        assert report.is_empty
        assert [(f.level, f.stage) for f in report.failures] == [(2, "assembly")]

    def test_source_first_level_failure(self):
        """Test a source series failing on its first level returns an empty report."""
        config = StudyConfig(
            case="manufactured", family="octagon", levels=[2, 4], ell=0
        )
        report = run_source_study(config)
        assert report.source_rows == []
        assert report.failures[0].level == 2
        assert report.failures[0].stage == "assembly"

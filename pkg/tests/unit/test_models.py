"""
Test suite for sfvem Pydantic models.

Covers the study configuration loaded by the CLI, the gateway request
models, and the report and response models.
"""

import json
from pathlib import Path

import pytest
from pydantic import ValidationError

from sfvem.assembly import Scheme
from sfvem.eigensolve import Strategy
from sfvem.exceptions import StudyError
from sfvem.mesh.validation import ValidationReport
from sfvem.models.requests import EigenRequest, MeshRequest, SourceRequest
from sfvem.models.responses import (
    EigenResponse,
    EigenvalueEntry,
    ErrorResponse,
    MeshResponse,
)
from sfvem.models.study import CaseName, ConvergenceReport, StudyConfig

pytestmark = pytest.mark.unit


class TestStudyConfig:
    """Test the convergence study configuration."""

    def test_defaults(self):
        """Test k, schemes, nev and base_case defaults."""
        config = StudyConfig(case="case1", family="pentagon", levels=[4, 8])
        assert config.k == 2
        assert config.schemes == [Scheme.SFVEM]
        assert config.nev == 5
        assert config.base_case is CaseName.LAPLACE
        assert not config.is_source_study
        assert config.mesh_family.shape_delta == 0.1

    def test_output_dir_default(self, monkeypatch, tmp_path):
        """Test out_dir falls back to SFVEM_OUT_DIR."""
        monkeypatch.setenv("SFVEM_OUT_DIR", str(tmp_path))
        config = StudyConfig(case="case1", family="quad", levels=[2])
        assert config.output_dir == tmp_path
        explicit = StudyConfig(
            case="case1", family="quad", levels=[2], out_dir=tmp_path / "x"
        )
        assert explicit.output_dir == tmp_path / "x"

    @pytest.mark.parametrize("levels", [[], [4, 4], [8, 4], [0, 2]])
    def test_invalid_levels(self, levels):
        """Test empty, non-increasing and non-positive levels are rejected."""
        with pytest.raises(ValidationError):
            StudyConfig(case="case1", family="quad", levels=levels)

    @pytest.mark.parametrize("k", [1, 5])
    def test_invalid_degree(self, k):
        """Test degrees outside 2..4 are rejected."""
        with pytest.raises(ValidationError) as exc_info:
            StudyConfig(case="case1", family="quad", levels=[2], k=k)
        assert "k must be one of" in str(exc_info.value)

    def test_unknown_key(self):
        """Test unknown keys are rejected."""
        with pytest.raises(ValidationError):
            StudyConfig(case="case1", family="quad", levels=[2], order=3)

    def test_duplicate_schemes(self):
        """Test repeated schemes collapse in order."""
        config = StudyConfig(
            case="case1", family="quad", levels=[2], schemes=["svem", "sfvem", "svem"]
        )
        assert config.schemes == [Scheme.SVEM, Scheme.SFVEM]

    def test_manufactured(self):
        """Test the manufactured case is a source study with a coefficient base."""
        config = StudyConfig(
            case="manufactured", family="octagon", levels=[2], base_case="case2"
        )
        assert config.is_source_study
        with pytest.raises(ValidationError):
            StudyConfig(
                case="manufactured",
                family="octagon",
                levels=[2],
                base_case="manufactured",
            )

    def test_from_file(self, tmp_path):
        """Test loading a JSON config."""
        path = tmp_path / "study.json"
        path.write_text(
            json.dumps(
                {"case": "case3", "family": "octagon", "levels": [4, 8, 16], "k": 3}
            )
        )
        config = StudyConfig.from_file(path)
        assert config.case is CaseName.CASE3
        assert config.levels == [4, 8, 16]

    def test_from_file_errors(self, tmp_path):
        """Test missing files and invalid JSON raise StudyError."""
        with pytest.raises(StudyError):
            StudyConfig.from_file(tmp_path / "missing.json")
        broken = tmp_path / "broken.json"
        broken.write_text("{case: ")
        with pytest.raises(StudyError):
            StudyConfig.from_file(broken)

    def test_from_file_invalid_values(self, tmp_path):
        """Test valid JSON with invalid values raises ValidationError."""
        path = tmp_path / "study.json"
        path.write_text(json.dumps({"case": "case1", "family": "quad", "levels": []}))
        with pytest.raises(ValidationError):
            StudyConfig.from_file(Path(path))


class TestRequestModels:
    """Test gateway request models."""

    def test_mesh_request_bounds(self):
        """Test n and c_t bounds."""
        assert MeshRequest(family="quad", n=64).n == 64
        with pytest.raises(ValidationError):
            MeshRequest(family="quad", n=65)
        with pytest.raises(ValidationError):
            MeshRequest(family="quad", n=4, c_t=0.0)

    def test_eigen_request(self):
        """Test defaults and the nev bound."""
        request = EigenRequest(case="case2", family="octagon", n=4)
        assert request.scheme is Scheme.SFVEM
        assert request.mesh_family.shape_delta == 0.15
        with pytest.raises(ValidationError):
            EigenRequest(case="case2", family="octagon", n=4, nev=21)

    def test_eigen_request_rejects_manufactured(self):
        """Test the manufactured case is rejected."""
        with pytest.raises(ValidationError) as exc_info:
            EigenRequest(case="manufactured", family="quad", n=4)
        assert "/api/source" in str(exc_info.value)

    def test_source_request(self):
        """Test the degree check on source requests."""
        assert SourceRequest(family="quad", n=4, k=4).k == 4
        with pytest.raises(ValidationError):
            SourceRequest(family="quad", n=4, k=6)


class TestResponseModels:
    """Test response and report models."""

    def test_mesh_response(self):
        """Test a mesh response carries its validation report."""
        report = ValidationReport(
            passed=True,
            c_t=0.05,
            min_star_radius_ratio=0.35,
            min_edge_ratio=0.7,
            max_vertex_count=4,
        )
        response = MeshResponse(
            family="quad",
            n=2,
            delta=0.0,
            vertices=9,
            cells=4,
            edges=12,
            h=0.7071,
            validation=report,
        )
        data = response.model_dump()
        assert data["success"] is True
        assert data["validation"]["passed"] is True
        assert response.timestamp.tzinfo is not None

    def test_eigen_response(self):
        """Test eigenvalue entries serialize with their errors."""
        response = EigenResponse(
            case="case1",
            family="quad",
            n=4,
            k=2,
            scheme="sfvem",
            ndof=49,
            strategy=Strategy.DENSE,
            eigenvalues=[
                EigenvalueEntry(
                    index=1, re=20.0, im=0.0, residual=1e-14, exact=19.99, abs_error=0.01
                )
            ],
        )
        assert response.model_dump(mode="json")["strategy"] == "dense"

    def test_error_response(self):
        """Test error responses default to success=False."""
        response = ErrorResponse(detail="cell 3: singular")
        assert response.success is False

    def test_report_stem(self):
        """Test the report stem names case, family, degree and scheme."""
        report = ConvergenceReport(case="case2", family="octagon", k=3, scheme="svem")
        assert report.stem == "case2_octagon_k3_svem"
        assert report.is_empty
        report.failure(4, "solve", "stalled")
        assert report.failed

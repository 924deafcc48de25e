"""
Study configuration and report models.

StudyConfig is validated from the JSON config of the ``convergence``
subcommand; reports collect one row per level and eigenvalue index.
"""

import json
from enum import Enum
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..assembly import Scheme
from ..config import get_settings
from ..exceptions import StudyError
from ..mesh.families import FamilyTag, MeshFamily

SUPPORTED_DEGREES = (2, 3, 4)


class CaseName(str, Enum):
    """Coefficient cases and the manufactured source problem."""

    CASE1 = "case1"
    CASE2 = "case2"
    CASE3 = "case3"
    LAPLACE = "laplace"
    MANUFACTURED = "manufactured"


class StudyConfig(BaseModel):
    """
    Convergence study configuration.

    ``levels`` are grid subdivisions n, strictly increasing. ``base_case``
    supplies the coefficients of the manufactured problem.
    """

    model_config = ConfigDict(validate_assignment=True, extra="forbid")

    case: CaseName = Field(..., description="Coefficient case")
    family: FamilyTag = Field(..., description="Mesh family")
    levels: list[int] = Field(..., min_length=1, description="Refinement list (n)")
    k: int = Field(default=2, description="Polynomial degree (2, 3 or 4)")
    ell: int | None = Field(default=None, ge=0, description="l override for every cell")
    schemes: list[Scheme] = Field(
        default_factory=lambda: [Scheme.SFVEM],
        min_length=1,
        description="Schemes to run",
    )
    nev: int = Field(default=5, ge=1, le=64, description="Exact eigenvalues tracked")
    delta: float | None = Field(
        default=None, ge=0.0, le=0.25, description="Mesh shape parameter"
    )
    out_dir: Path | None = Field(default=None, description="Output directory")
    base_case: CaseName = Field(
        default=CaseName.LAPLACE, description="Coefficients of the manufactured problem"
    )
    eigfun_errors: bool = Field(
        default=False, description="Report eigenfunction errors"
    )

    @field_validator("levels")
    @classmethod
    def validate_levels(cls, v: list[int]) -> list[int]:
        if any(n < 1 for n in v):
            raise ValueError("levels must be positive")
        if any(b <= a for a, b in zip(v, v[1:], strict=False)):
            raise ValueError("levels must be strictly increasing")
        return v

    @field_validator("k")
    @classmethod
    def validate_degree(cls, v: int) -> int:
        if v not in SUPPORTED_DEGREES:
            raise ValueError(f"k must be one of {SUPPORTED_DEGREES}")
        return v

    @field_validator("schemes")
    @classmethod
    def validate_schemes(cls, v: list[Scheme]) -> list[Scheme]:
        return list(dict.fromkeys(v))

    @field_validator("base_case")
    @classmethod
    def validate_base_case(cls, v: CaseName) -> CaseName:
        if v is CaseName.MANUFACTURED:
            raise ValueError("base_case must be a coefficient case")
        return v

    @property
    def mesh_family(self) -> MeshFamily:
        return MeshFamily(tag=self.family, delta=self.delta)

    @property
    def output_dir(self) -> Path:
        return self.out_dir if self.out_dir is not None else get_settings().out_dir

    @property
    def is_source_study(self) -> bool:
        return self.case is CaseName.MANUFACTURED

    @classmethod
    def from_file(cls, path: str | Path) -> "StudyConfig":
        """
        Load a JSON config.

        Raises:
            StudyError: unreadable file or invalid JSON
            pydantic.ValidationError: invalid keys or values
        """
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise StudyError(f"cannot read study config {path}: {e}") from e
        return cls.model_validate(data)


class ConvergenceRow(BaseModel):
    """One eigenvalue index at one level."""

    level: int
    h: float
    ndof: int
    eig_index: int
    lambda_re: float
    lambda_im: float
    abs_error: float
    rate: float | None = None
    multiplicity: int = Field(default=1, description="Detected discrete multiplicity")


class SourceRow(BaseModel):
    """Source-problem errors at one level."""

    level: int
    h: float
    ndof: int
    l2_error: float
    l2_rate: float | None = None
    energy_error: float
    energy_rate: float | None = None


class EigenfunctionRow(BaseModel):
    """Phase-normalized eigenfunction errors at one level."""

    level: int
    h: float
    ndof: int
    eig_index: int
    l2_error: float
    energy_error: float


class StudyFailure(BaseModel):
    """A level that failed, with the stage that raised."""

    level: int
    stage: str
    message: str


class ConvergenceReport(BaseModel):
    """Per-level errors and observed rates of one scheme."""

    case: CaseName
    family: FamilyTag
    k: int
    scheme: Scheme
    rows: list[ConvergenceRow] = Field(default_factory=list)
    source_rows: list[SourceRow] = Field(default_factory=list)
    eigfun_rows: list[EigenfunctionRow] = Field(default_factory=list)
    failures: list[StudyFailure] = Field(default_factory=list)

    @property
    def stem(self) -> str:
        return f"{self.case.value}_{self.family.value}_k{self.k}_{self.scheme.value}"

    @property
    def is_empty(self) -> bool:
        return not (self.rows or self.source_rows)

    @property
    def failed(self) -> bool:
        return bool(self.failures)

    def failure(self, level: int, stage: str, message: str) -> None:
        self.failures.append(StudyFailure(level=level, stage=stage, message=message))

    def errors(self, eig_index: int) -> list[float]:
        """Errors of one eigenvalue index across levels."""
        return [row.abs_error for row in self.rows if row.eig_index == eig_index]

    def rates(self, eig_index: int) -> list[float | None]:
        return [row.rate for row in self.rows if row.eig_index == eig_index]

    def multiplicities(self, eig_index: int) -> list[int]:
        return [row.multiplicity for row in self.rows if row.eig_index == eig_index]

    def summary(self) -> str:
        """Compact text table for the terminal."""
        lines = [self.stem]
        if self.source_rows:
            lines.append(
                f"{'n':>4} {'h':>10} {'ndof':>7} {'L2':>11} {'rate':>6}"
                f" {'energy':>11} {'rate':>6}"
            )
            for row in self.source_rows:
                lines.append(
                    f"{row.level:>4} {row.h:>10.4e} {row.ndof:>7} {row.l2_error:>11.4e}"
                    f" {_fmt_rate(row.l2_rate)} {row.energy_error:>11.4e}"
                    f" {_fmt_rate(row.energy_rate)}"
                )
        else:
            lines.append(
                f"{'n':>4} {'h':>10} {'ndof':>7} {'j':>3} {'error':>11} {'rate':>6}"
            )
            for row in self.rows:
                lines.append(
                    f"{row.level:>4} {row.h:>10.4e} {row.ndof:>7} {row.eig_index:>3}"
                    f" {row.abs_error:>11.4e} {_fmt_rate(row.rate)}"
                )
        for failure in self.failures:
            lines.append(
                f"level {failure.level} failed at {failure.stage}: {failure.message}"
            )
        return "\n".join(lines)


def _fmt_rate(rate: float | None) -> str:
    return f"{'-':>6}" if rate is None else f"{rate:>6.2f}"

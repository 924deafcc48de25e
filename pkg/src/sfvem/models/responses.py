"""
Response models for the sfvem HTTP gateway.
"""

from datetime import datetime, timezone

UTC = timezone.utc

from pydantic import BaseModel, ConfigDict, Field

from ..assembly import Scheme
from ..eigensolve import Strategy
from ..mesh.families import FamilyTag
from ..mesh.validation import ValidationReport
from .study import CaseName


class BaseResponse(BaseModel):
    """Base response model with common fields."""

    model_config = ConfigDict(validate_assignment=True)

    success: bool = Field(
        default=True, description="Indicates if the request was successful"
    )
    message: str | None = Field(
        default=None, description="Optional message about the response"
    )
    timestamp: datetime = Field(
        default_factory=lambda: datetime.now(UTC),
        description="Response timestamp in UTC",
    )


class MeshResponse(BaseResponse):
    """Counts, mesh size and shape-regularity report of a generated mesh."""

    family: FamilyTag
    n: int = Field(..., ge=1)
    delta: float = Field(..., description="Shape parameter actually used")
    vertices: int = Field(..., ge=0)
    cells: int = Field(..., ge=0)
    edges: int = Field(..., ge=0)
    h: float = Field(..., gt=0, description="Largest cell diameter")
    validation: ValidationReport


class EigenvalueEntry(BaseModel):
    """One computed eigenvalue and its error against the closed form."""

    index: int = Field(..., ge=1)
    re: float
    im: float
    residual: float = Field(..., ge=0)
    exact: float | None = Field(default=None, description="Closed-form value")
    abs_error: float | None = Field(default=None, ge=0)


class EigenResponse(BaseResponse):
    """Smallest-modulus eigenvalues of one discrete problem."""

    case: CaseName
    family: FamilyTag
    n: int
    k: int
    scheme: Scheme
    ndof: int = Field(..., ge=0, description="Free degrees of freedom")
    strategy: Strategy
    eigenvalues: list[EigenvalueEntry]


class SourceResponse(BaseResponse):
    """Errors of the manufactured source problem on one mesh."""

    family: FamilyTag
    n: int
    k: int
    base_case: CaseName
    scheme: Scheme
    ndof: int = Field(..., ge=0)
    l2_error: float = Field(..., ge=0)
    energy_error: float = Field(..., ge=0)


class ErrorResponse(BaseResponse):
    """Error payload."""

    success: bool = Field(default=False)
    detail: str = Field(..., description="Error message")


ERROR_RESPONSES: dict[int | str, dict[str, object]] = {
    422: {"model": ErrorResponse, "description": "Invalid problem input"},
    500: {"model": ErrorResponse, "description": "Computation failed"},
}

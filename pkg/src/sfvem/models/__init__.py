"""Pydantic models: study configuration and reports, HTTP requests and responses."""

from .requests import EigenRequest, MeshRequest, SourceRequest
from .responses import (
    BaseResponse,
    EigenResponse,
    EigenvalueEntry,
    ErrorResponse,
    MeshResponse,
    SourceResponse,
)
from .study import (
    CaseName,
    ConvergenceReport,
    ConvergenceRow,
    EigenfunctionRow,
    SourceRow,
    StudyConfig,
    StudyFailure,
)

__all__ = [
    "BaseResponse",
    "CaseName",
    "ConvergenceReport",
    "ConvergenceRow",
    "EigenRequest",
    "EigenResponse",
    "EigenfunctionRow",
    "EigenvalueEntry",
    "ErrorResponse",
    "MeshRequest",
    "MeshResponse",
    "SourceRequest",
    "SourceResponse",
    "SourceRow",
    "StudyConfig",
    "StudyFailure",
]

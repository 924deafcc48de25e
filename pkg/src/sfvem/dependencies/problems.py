"""
Request dependencies for the sfvem gateway.

Path and query parameters are validated into request models here, and
library exceptions raised inside a handler are mapped to HTTP status codes:
input problems to 422, everything else to 500.
"""

from collections.abc import Iterator
from contextlib import contextmanager
from typing import TypeVar

from fastapi import HTTPException, Path, Query
from pydantic import BaseModel, ValidationError

from ..exceptions import (
    MeshGenerationError,
    ProblemSpecError,
    SfvemError,
    StudyError,
)
from ..log import get_component_logger
from ..models.requests import EigenRequest, MeshRequest, SourceRequest

logger = get_component_logger("sfvem.api.dependencies")

INPUT_ERRORS = (MeshGenerationError, ProblemSpecError, StudyError)

RequestT = TypeVar("RequestT", bound=BaseModel)


def _build(model: type[RequestT], **params: object) -> RequestT:
    """
    Validate parameters into ``model``.

    Raises:
        HTTPException: 422 status code listing the invalid fields
    """
    try:
        return model(**{k: v for k, v in params.items() if v is not None})
    except ValidationError as e:
        detail = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}"
            for err in e.errors()
        )
        logger.warning(
            "Invalid request parameters", model=model.__name__, detail=detail
        )
        raise HTTPException(status_code=422, detail=detail) from e


def get_mesh_request(
    family: str = Path(..., description="quad, pentagon or octagon (t1-t3)"),
    n: int = Path(..., description="Grid subdivisions per side"),
    delta: float | None = Query(default=None, description="Mesh shape parameter"),
    c_t: float | None = Query(default=None, description="Shape-regularity ratio"),
) -> MeshRequest:
    """FastAPI dependency for GET /api/meshes/{family}/{n}."""
    return _build(MeshRequest, family=family, n=n, delta=delta, c_t=c_t)


def get_eigen_request(
    case: str = Path(..., description="case1, case2, case3 or laplace"),
    family: str = Path(..., description="Mesh family"),
    n: int = Path(..., description="Grid subdivisions per side"),
    k: int | None = Query(default=None, description="Polynomial degree (2-4)"),
    ell: int | None = Query(default=None, description="l override"),
    scheme: str | None = Query(default=None, description="sfvem or svem"),
    nev: int | None = Query(default=None, description="Number of eigenvalues"),
    delta: float | None = Query(default=None, description="Mesh shape parameter"),
) -> EigenRequest:
    """FastAPI dependency for GET /api/eigen/{case}/{family}/{n}."""
    return _build(
        EigenRequest,
        case=case,
        family=family,
        n=n,
        k=k,
        ell=ell,
        scheme=scheme,
        nev=nev,
        delta=delta,
    )


def get_source_request(
    family: str = Path(..., description="Mesh family"),
    n: int = Path(..., description="Grid subdivisions per side"),
    k: int | None = Query(default=None, description="Polynomial degree (2-4)"),
    base_case: str | None = Query(default=None, description="Coefficient case"),
    scheme: str | None = Query(default=None, description="sfvem or svem"),
    delta: float | None = Query(default=None, description="Mesh shape parameter"),
) -> SourceRequest:
    """FastAPI dependency for GET /api/source/{family}/{n}."""
    return _build(
        SourceRequest,
        family=family,
        n=n,
        k=k,
        base_case=base_case,
        scheme=scheme,
        delta=delta,
    )


@contextmanager
def library_errors(operation: str) -> Iterator[None]:
    """
    Map library exceptions to HTTP errors.

    Raises:
        HTTPException: 422 for invalid problem input, 500 for other failures
    """
    try:
        yield
    except INPUT_ERRORS as e:
        logger.warning("Rejected problem input", operation=operation, error=str(e))
        raise HTTPException(status_code=422, detail=str(e)) from e
    except SfvemError as e:
        logger.error("Computation failed", operation=operation, error=str(e))
        raise HTTPException(status_code=500, detail=str(e)) from e

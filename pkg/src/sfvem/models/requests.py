"""
Request models for the sfvem HTTP gateway.

Each endpoint's path and query parameters are collected into one of these
models so that range checks live in one place.
"""

from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..assembly import Scheme
from ..mesh.families import FamilyTag, MeshFamily
from .study import SUPPORTED_DEGREES, CaseName

MAX_API_LEVEL = 64


class MeshRequest(BaseModel):
    """
    Mesh generation and validation parameters.

    Used by GET /api/meshes/{family}/{n}.
    """

    model_config = ConfigDict(validate_assignment=True, str_strip_whitespace=True)

    family: FamilyTag = Field(..., description="quad, pentagon or octagon (t1-t3)")
    n: int = Field(
        ..., ge=1, le=MAX_API_LEVEL, description="Grid subdivisions per side"
    )
    delta: float | None = Field(
        default=None, ge=0.0, le=0.25, description="Mesh shape parameter"
    )
    c_t: float = Field(
        default=0.05, gt=0.0, le=1.0, description="Required shape-regularity ratio"
    )

    @property
    def mesh_family(self) -> MeshFamily:
        return MeshFamily(tag=self.family, delta=self.delta)


class EigenRequest(BaseModel):
    """
    Eigenvalue solve parameters.

    Used by GET /api/eigen/{case}/{family}/{n}.
    """

    model_config = ConfigDict(validate_assignment=True, str_strip_whitespace=True)

    case: CaseName = Field(..., description="case1, case2, case3 or laplace")
    family: FamilyTag = Field(..., description="Mesh family")
    n: int = Field(..., ge=1, le=MAX_API_LEVEL, description="Grid subdivisions")
    k: int = Field(default=2, description="Polynomial degree")
    ell: int | None = Field(default=None, ge=0, le=8, description="l override")
    scheme: Scheme = Field(default=Scheme.SFVEM, description="sfvem or svem")
    nev: int = Field(default=5, ge=1, le=20, description="Number of eigenvalues")
    delta: float | None = Field(default=None, ge=0.0, le=0.25)

    @field_validator("case")
    @classmethod
    def validate_case(cls, v: CaseName) -> CaseName:
        if v is CaseName.MANUFACTURED:
            raise ValueError("the manufactured case is served by /api/source")
        return v

    @field_validator("k")
    @classmethod
    def validate_degree(cls, v: int) -> int:
        if v not in SUPPORTED_DEGREES:
            raise ValueError(f"k must be one of {SUPPORTED_DEGREES}")
        return v

    @property
    def mesh_family(self) -> MeshFamily:
        return MeshFamily(tag=self.family, delta=self.delta)


class SourceRequest(BaseModel):
    """
    Manufactured source problem parameters.

    Used by GET /api/source/{family}/{n}.
    """

    model_config = ConfigDict(validate_assignment=True, str_strip_whitespace=True)

    family: FamilyTag = Field(..., description="Mesh family")
    n: int = Field(..., ge=1, le=MAX_API_LEVEL, description="Grid subdivisions")
    k: int = Field(default=2, description="Polynomial degree")
    base_case: CaseName = Field(
        default=CaseName.LAPLACE, description="Coefficients of the load"
    )
    scheme: Scheme = Field(default=Scheme.SFVEM)
    delta: float | None = Field(default=None, ge=0.0, le=0.25)

    @field_validator("k")
    @classmethod
    def validate_degree(cls, v: int) -> int:
        if v not in SUPPORTED_DEGREES:
            raise ValueError(f"k must be one of {SUPPORTED_DEGREES}")
        return v

    @field_validator("base_case")
    @classmethod
    def validate_base_case(cls, v: CaseName) -> CaseName:
        if v is CaseName.MANUFACTURED:
            raise ValueError("base_case must be a coefficient case")
        return v

    @property
    def mesh_family(self) -> MeshFamily:
        return MeshFamily(tag=self.family, delta=self.delta)

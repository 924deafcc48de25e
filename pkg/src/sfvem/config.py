"""
Runtime settings for sfvem.

Settings come from the environment (a project ``.env`` is loaded first) and
are cached for the life of the process. Call ``get_settings.cache_clear()``
after changing the environment in tests.
"""

import os
from functools import lru_cache
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field

try:
    from dotenv import load_dotenv
except ImportError:  # pragma: no cover
    load_dotenv = None


class Settings(BaseModel):
    """Solver thresholds, assembly parallelism and server defaults."""

    model_config = ConfigDict(frozen=True)

    dense_limit: int = Field(
        default=3000, ge=1, description="Free-DOF count up to which QZ is used"
    )
    residual_tol: float = Field(
        default=1e-8, gt=0, description="Maximum accepted eigenpair residual"
    )
    linear_residual_tol: float = Field(
        default=1e-10, gt=0, description="Maximum accepted linear-solve residual"
    )
    cluster_tol: float = Field(
        default=1e-6, ge=0, description="Base relative eigenvalue clustering tolerance"
    )
    condition_warn: float = Field(
        default=1e12,
        gt=1,
        description="Projector condition estimate that triggers a warning",
    )
    assembly_workers: int = Field(
        default=1, ge=1, description="Threads used for the element loop"
    )
    out_dir: Path = Field(
        default=Path("results"), description="Default output directory"
    )
    api_host: str = Field(default="0.0.0.0")
    api_port: int = Field(default=9000, ge=9000)
    api_reload: bool = Field(default=False)

    @classmethod
    def from_env(cls) -> "Settings":
        """Build settings from SFVEM_* and API_* environment variables."""
        env = {
            "dense_limit": os.getenv("SFVEM_DENSE_LIMIT"),
            "residual_tol": os.getenv("SFVEM_RESIDUAL_TOL"),
            "linear_residual_tol": os.getenv("SFVEM_LINEAR_RESIDUAL_TOL"),
            "cluster_tol": os.getenv("SFVEM_CLUSTER_TOL"),
            "condition_warn": os.getenv("SFVEM_CONDITION_WARN"),
            "assembly_workers": os.getenv("SFVEM_ASSEMBLY_WORKERS"),
            "out_dir": os.getenv("SFVEM_OUT_DIR"),
            "api_host": os.getenv("API_HOST"),
            "api_port": os.getenv("API_PORT"),
            "api_reload": os.getenv("API_RELOAD"),
        }
        return cls(**{key: value for key, value in env.items() if value is not None})


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Load ``.env`` once and return the cached settings."""
    if load_dotenv is not None:
        load_dotenv()
    return Settings.from_env()

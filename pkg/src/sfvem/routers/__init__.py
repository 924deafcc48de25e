"""
FastAPI routers for the sfvem gateway.

- meshes: mesh generation and validation
- eigen: discrete eigenvalue solves against the exact spectrum
- source: manufactured source problem errors
"""

from .eigen import router as eigen_router
from .meshes import router as meshes_router
from .source import router as source_router

__all__ = ["meshes_router", "eigen_router", "source_router"]

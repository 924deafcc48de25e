"""
SfvemGateway - HTTP surface of the sfvem library.

Composes the mesh, eigen and source routers into a FastAPI application for
desk-side exploration of the discretizations.
"""

from collections.abc import AsyncIterator
from contextlib import asynccontextmanager

from fastapi import APIRouter, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from .log import get_component_logger
from .models.responses import ErrorResponse

logger = get_component_logger("sfvem.api")


class SfvemGateway:
    """
    Gateway class for the sfvem HTTP API.

    Can be used in two ways:
    1. As a standalone server for exploration
    2. As a set of routers mounted into another application

    Examples:
        # Standalone usage
        gateway = SfvemGateway()
        app = gateway.get_app()

        # Composition under a prefix
        gateway = SfvemGateway(prefix="/vem")
        routers = gateway.get_routers()
    """

    def __init__(
        self,
        title: str = "sfvem",
        description: str = "Stabilization-free virtual elements on polygonal meshes",
        version: str = "0.1.0",
        prefix: str = "",
    ):
        """
        Initialize the gateway.

        Args:
            title: FastAPI app title
            description: FastAPI app description
            version: API version
            prefix: URL prefix for all routes (e.g., "/vem")
        """
        self.title = title
        self.description = description
        self.version = version
        self.prefix = prefix
        self._app: FastAPI | None = None

        logger.info(
            "SfvemGateway initialized",
            title=title,
            version=version,
            prefix=prefix,
        )

    def get_app(self) -> FastAPI:
        """
        Get or create the FastAPI application.

        Returns:
            FastAPI application instance
        """
        if self._app is None:
            self._app = self._create_app()
        return self._app

    def _create_app(self) -> FastAPI:
        """Create and configure the FastAPI application."""
        app = FastAPI(
            title=self.title,
            description=self.description,
            version=self.version,
            docs_url=f"{self.prefix}/docs" if self.prefix else "/docs",
            redoc_url=f"{self.prefix}/redoc" if self.prefix else "/redoc",
            lifespan=self._lifespan,
        )

        app.add_middleware(
            CORSMiddleware,
            allow_origins=["*"],
            allow_credentials=True,
            allow_methods=["*"],
            allow_headers=["*"],
        )

        self._add_error_handler(app)
        self._add_routes(app)

        logger.info("FastAPI application created")
        return app

    def _add_error_handler(self, app: FastAPI) -> None:
        """Serve HTTP errors as ErrorResponse payloads."""

        @app.exception_handler(StarletteHTTPException)
        async def http_error(
            request: Request, exc: StarletteHTTPException
        ) -> JSONResponse:
            body = ErrorResponse(detail=str(exc.detail))
            return JSONResponse(
                status_code=exc.status_code,
                content=body.model_dump(mode="json"),
                headers=getattr(exc, "headers", None),
            )

        @app.exception_handler(RequestValidationError)
        async def validation_error(
            request: Request, exc: RequestValidationError
        ) -> JSONResponse:
            fields = ", ".join(str(err["loc"][-1]) for err in exc.errors())
            body = ErrorResponse(detail=f"Invalid parameters: {fields}")
            return JSONResponse(status_code=422, content=body.model_dump(mode="json"))

    def _add_routes(self, app: FastAPI) -> None:
        """Add routes to the application."""

        @app.get(f"{self.prefix}/health")
        async def health_check() -> dict[str, str]:
            """Health check endpoint."""
            logger.debug("Health check requested")
            return {"status": "healthy", "service": "sfvem"}

        @app.get(f"{self.prefix}/")
        async def root() -> dict[str, str]:
            """Root endpoint."""
            logger.debug("Root endpoint requested")
            return {
                "message": "sfvem",
                "description": self.description,
                "docs_url": f"{self.prefix}/docs",
                "health_url": f"{self.prefix}/health",
            }

        # /api/meshes, /api/eigen, /api/source
        for router in self.get_routers():
            app.include_router(router, prefix=f"{self.prefix}/api")

    @asynccontextmanager
    async def _lifespan(self, app: FastAPI) -> AsyncIterator[None]:
        """Startup and shutdown logging."""
        logger.info(
            "sfvem gateway starting up",
            service="sfvem",
            version=self.version,
            prefix=self.prefix,
        )
        yield
        logger.info("sfvem gateway shutting down")

    def get_routers(self) -> list[APIRouter]:
        """
        Get all routers for composition.

        Returns:
            List of FastAPI router instances
        """
        from .routers import eigen_router, meshes_router, source_router

        routers = [meshes_router, eigen_router, source_router]
        logger.debug("Returning routers", count=len(routers))
        return routers

"""
Standalone server for the sfvem gateway.

Usage:
    python -m sfvem.standalone_server

    Or with uvicorn directly:
    uvicorn sfvem.standalone_server:app --reload
"""

from .config import get_settings
from .gateway import SfvemGateway

gateway = SfvemGateway(
    title="sfvem - Standalone Server",
    description="""
    Standalone server for stabilization-free virtual element computations.

    ## Endpoints
    - Meshes: /api/meshes/{family}/{n}
    - Eigenvalues: /api/eigen/{case}/{family}/{n}
    - Source problem: /api/source/{family}/{n}

    ## Documentation
    - Swagger UI: /docs
    - ReDoc: /redoc
    - Health Check: /health
    """,
)

app = gateway.get_app()


def run() -> None:
    """Serve ``app`` with uvicorn using API_HOST, API_PORT and API_RELOAD."""
    import uvicorn

    settings = get_settings()
    print("Starting sfvem standalone server")
    print(f"   Host: {settings.api_host}:{settings.api_port}")
    print(f"   Reload: {settings.api_reload}")
    print(f"   Docs: http://{settings.api_host}:{settings.api_port}/docs")

    uvicorn.run(
        "sfvem.standalone_server:app",
        host=settings.api_host,
        port=settings.api_port,
        reload=settings.api_reload,
        log_level="info",
    )


if __name__ == "__main__":
    run()

"""
Test configuration and fixtures for sfvem tests.

Meshes and projector caches used by several modules are built once per
session; settings are re-read from the environment for every test so that
monkeypatched variables take effect.
"""

from collections.abc import AsyncGenerator
from pathlib import Path

import pytest
from dotenv import load_dotenv
from fastapi.testclient import TestClient
from httpx import ASGITransport, AsyncClient

# Load .env file from project root before importing sfvem modules
project_root = Path(__file__).parent.parent
env_path = project_root / ".env"
if env_path.exists():
    load_dotenv(env_path)

from sfvem import SfvemGateway  # noqa: E402
from sfvem.assembly import ProblemSpec  # noqa: E402
from sfvem.config import get_settings  # noqa: E402
from sfvem.mesh import FamilyTag  # noqa: E402
from sfvem.mesh.geometry import PolygonMesh  # noqa: E402

from tests.factories import build_mesh, unit_square_mesh  # noqa: E402


@pytest.fixture(autouse=True)
def fresh_settings():
    """Drop cached settings before and after every test."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture(scope="session")
def quad_mesh() -> PolygonMesh:
    """T1 mesh with n=2."""
    return build_mesh(FamilyTag.QUAD, 2)


@pytest.fixture(scope="session")
def pentagon_mesh() -> PolygonMesh:
    """T2 mesh with n=2."""
    return build_mesh(FamilyTag.PENTAGON, 2)


@pytest.fixture(scope="session")
def octagon_mesh() -> PolygonMesh:
    """T3 mesh with n=2."""
    return build_mesh(FamilyTag.OCTAGON, 2)


@pytest.fixture(scope="session")
def single_cell_mesh() -> PolygonMesh:
    """The unit square as one cell."""
    return unit_square_mesh()


@pytest.fixture(params=list(FamilyTag), ids=lambda tag: tag.value)
def family(request) -> FamilyTag:
    """Every mesh family in turn."""
    return request.param


@pytest.fixture
def laplace_spec() -> ProblemSpec:
    """K = I, no convection, k = 2."""
    return ProblemSpec(k=2)


# FastAPI gateway fixtures
@pytest.fixture
def gateway() -> SfvemGateway:
    """Create an SfvemGateway instance for testing."""
    return SfvemGateway(
        title="Test sfvem API",
        description="Test instance of the sfvem gateway",
        version="0.1.0-test",
    )


@pytest.fixture
def app(gateway):
    """Create a FastAPI app instance for testing."""
    return gateway.get_app()


@pytest.fixture
def client(app) -> TestClient:
    """Create a test client for synchronous testing."""
    return TestClient(app)


@pytest.fixture
def prefixed_client() -> TestClient:
    """Create a test client using a gateway with a URL prefix."""
    gateway = SfvemGateway(
        title="Test sfvem API",
        description="Test instance of the sfvem gateway with prefix",
        version="0.1.0-test",
        prefix="/vem",
    )
    return TestClient(gateway.get_app())


@pytest.fixture
async def async_client(app) -> AsyncGenerator[AsyncClient, None]:
    """Create an async test client for asynchronous testing."""
    transport = ASGITransport(app=app)
    async with AsyncClient(transport=transport, base_url="http://test") as ac:
        yield ac


def pytest_configure(config):
    """Configure pytest with custom markers."""
    config.addinivalue_line(
        "markers", "slow: marks tests as slow (deselect with '-m \"not slow\"')"
    )
    config.addinivalue_line("markers", "integration: marks tests as integration tests")
    config.addinivalue_line("markers", "unit: marks tests as unit tests")
    config.addinivalue_line("markers", "api: marks tests as API endpoint tests")

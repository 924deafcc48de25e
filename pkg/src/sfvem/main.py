"""
Module-level app for ``uvicorn sfvem.main:app``.

For composition, prefer ``from sfvem import SfvemGateway``.
"""

from dotenv import load_dotenv

load_dotenv()

from .gateway import SfvemGateway  # noqa: E402

_gateway = SfvemGateway()
app = _gateway.get_app()

__all__ = ["app"]

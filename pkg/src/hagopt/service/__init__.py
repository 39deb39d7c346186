"""FastAPI service exposing the optimization library over HTTP."""

from .app import app

__all__ = ["app"]

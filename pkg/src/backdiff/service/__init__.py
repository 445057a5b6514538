"""HTTP service wrapping the enhancement pipelines."""

from .app import app, create_app

__all__ = ["app", "create_app"]

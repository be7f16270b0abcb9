"""HTTP service wrapping the netflow core."""

from .app import app

__all__ = ["app"]

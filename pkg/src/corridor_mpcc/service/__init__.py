"""HTTP facade over the contouring controller toolkit."""

from .app import app, create_app

__all__ = ["app", "create_app"]

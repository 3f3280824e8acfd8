"""HTTP service exposing the scoring pipeline."""

from .app import create_app
from .handlers import handle_compare, handle_fetch, handle_score

__all__ = ["create_app", "handle_fetch", "handle_score", "handle_compare"]

"""Service layer: persistence, engine composition, HTTP API and CLI."""

from .engine import Engine, EngineConfig  # noqa: F401

"""Logging adapter: one idempotent lib_log_rich initialisation for every entry point."""

from __future__ import annotations

from .setup import init_logging

__all__ = ["init_logging"]

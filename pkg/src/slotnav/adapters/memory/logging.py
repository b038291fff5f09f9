"""In-memory logging adapter: leaves std logging untouched."""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from lib_layered_config import Config


def init_logging_in_memory(config: Config) -> None:
    """No-op; tests read records through pytest's ``caplog``."""


__all__ = ["init_logging_in_memory"]

"""In-memory adapters behind ``build_testing``: configuration and logging without I/O."""

from __future__ import annotations

from .config import (
    apply_config_files_in_memory,
    display_config_in_memory,
    get_config_in_memory,
    load_settings_in_memory,
)
from .logging import init_logging_in_memory

__all__ = [
    "apply_config_files_in_memory",
    "display_config_in_memory",
    "get_config_in_memory",
    "init_logging_in_memory",
    "load_settings_in_memory",
]

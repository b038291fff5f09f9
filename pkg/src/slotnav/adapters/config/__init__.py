"""Configuration adapter: layered loading, overrides, typed settings, display."""

from __future__ import annotations

from .display import display_config
from .loader import DEFAULT_CONFIG_FILE, get_config
from .overrides import apply_config_files, apply_overrides, flag_overrides, merge_overrides, parse_config_text
from .settings import AppSettings, GenerationSettings, load_settings

__all__ = [
    "DEFAULT_CONFIG_FILE",
    "AppSettings",
    "GenerationSettings",
    "apply_config_files",
    "apply_overrides",
    "display_config",
    "flag_overrides",
    "get_config",
    "load_settings",
    "merge_overrides",
    "parse_config_text",
]

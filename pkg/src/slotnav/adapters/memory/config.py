"""Configuration without files or environment: every section takes its model defaults."""

from __future__ import annotations

from typing import TYPE_CHECKING

from lib_layered_config import Config

from ...domain.enums import OutputFormat
from ..config.settings import AppSettings, load_settings

if TYPE_CHECKING:
    from collections.abc import Sequence


def get_config_in_memory(
    *, profile: str | None = None, start_dir: str | None = None, dotenv_path: str | None = None
) -> Config:
    """The same empty configuration for every profile."""
    return Config({}, {})


def apply_config_files_in_memory(config: Config, paths: Sequence[str]) -> Config:
    return config


def load_settings_in_memory(config: Config) -> AppSettings:
    """Production validation; ``--set`` and ``--seed`` still reach the models."""
    return load_settings(config)


def display_config_in_memory(
    config: Config,
    *,
    output_format: OutputFormat = OutputFormat.HUMAN,
    section: str | None = None,
    profile: str | None = None,
) -> None:
    """Prints nothing; ``config --validated`` is the testable view."""


__all__ = [
    "apply_config_files_in_memory",
    "display_config_in_memory",
    "get_config_in_memory",
    "load_settings_in_memory",
]

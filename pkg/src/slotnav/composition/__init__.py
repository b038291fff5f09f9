"""Wires the configuration and logging adapters into :class:`AppServices`.

``build_production`` reads real files and the environment; ``build_testing``
validates the pydantic defaults only, so CLI tests see the same numbers on
every machine.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from ..adapters.config.display import display_config
from ..adapters.config.loader import get_config
from ..adapters.config.overrides import apply_config_files
from ..adapters.config.settings import load_settings
from ..adapters.logging.setup import init_logging

if TYPE_CHECKING:
    from ..application.ports import ApplyConfigFiles, DisplayConfig, GetConfig, InitLogging, LoadSettings


@dataclass(frozen=True, slots=True)
class AppServices:
    """The adapters one CLI invocation runs on; passed to the root group as ``obj``."""

    get_config: GetConfig
    apply_config_files: ApplyConfigFiles
    load_settings: LoadSettings
    display_config: DisplayConfig
    init_logging: InitLogging


def build_production() -> AppServices:
    return AppServices(
        get_config=get_config,
        apply_config_files=apply_config_files,
        load_settings=load_settings,
        display_config=display_config,
        init_logging=init_logging,
    )


def build_testing() -> AppServices:
    """In-memory adapters: empty layers, ignored ``--config`` files, no log runtime."""
    from ..adapters import memory  # noqa: PLC0415 - keeps test adapters out of the production import graph

    return AppServices(
        get_config=memory.get_config_in_memory,
        apply_config_files=memory.apply_config_files_in_memory,
        load_settings=memory.load_settings_in_memory,
        display_config=memory.display_config_in_memory,
        init_logging=memory.init_logging_in_memory,
    )


__all__ = ["AppServices", "build_production", "build_testing"]

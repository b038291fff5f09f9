"""What the CLI needs from configuration and logging, as callable protocols.

Plain module functions satisfy these structurally; ``composition`` checks
each adapter against its port under ``TYPE_CHECKING``. ``Config`` and
``AppSettings`` are only imported for annotations, so this layer stays free
of adapter imports at runtime.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Protocol

if TYPE_CHECKING:
    from collections.abc import Sequence

    from lib_layered_config import Config

    from ..adapters.config.settings import AppSettings
    from ..domain.enums import OutputFormat


class GetConfig(Protocol):
    """Layered configuration for a profile (defaults through environment)."""

    def __call__(
        self, *, profile: str | None = ..., start_dir: str | None = ..., dotenv_path: str | None = ...
    ) -> Config: ...


class ApplyConfigFiles(Protocol):
    """``--config`` files, applied in order over ``config``."""

    def __call__(self, config: Config, paths: Sequence[str]) -> Config: ...


class LoadSettings(Protocol):
    """Validated encoder, objective, training, navigation and generation settings.

    Implementations raise ``ContractError`` for a section that does not validate.
    """

    def __call__(self, config: Config) -> AppSettings: ...


class DisplayConfig(Protocol):
    def __call__(
        self, config: Config, *, output_format: OutputFormat = ..., section: str | None = ..., profile: str | None = ...
    ) -> None: ...


class InitLogging(Protocol):
    """Start the process-wide log runtime; repeated calls are no-ops."""

    def __call__(self, config: Config) -> None: ...


__all__ = ["ApplyConfigFiles", "DisplayConfig", "GetConfig", "InitLogging", "LoadSettings"]

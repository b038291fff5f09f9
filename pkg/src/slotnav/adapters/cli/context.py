"""Per-invocation CLI state: services, merged configuration, validated settings.

The root group builds the configuration from a profile plus an
:class:`OverrideRecipe` (``--set``, ``--config``, ``--seed``, ``--offline``).
The recipe is kept so a subcommand that switches profile rebuilds the same
layers on top of the other profile.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, NamedTuple

import lib_cli_exit_tools
import rich_click as click

from slotnav.adapters.config.overrides import apply_overrides, flag_overrides, merge_overrides

if TYPE_CHECKING:
    from lib_layered_config import Config

    from slotnav.adapters.config.settings import AppSettings
    from slotnav.composition import AppServices


@dataclass(frozen=True, slots=True)
class OverrideRecipe:
    """Root-option layers applied over a profile's configuration, lowest first."""

    set_overrides: tuple[str, ...] = ()
    config_files: tuple[str, ...] = ()
    seed: int | None = None
    offline: bool = False
    env_file: str | None = None

    def apply(self, services: AppServices, config: Config) -> Config:
        """Layer ``--set``, then ``--config`` files, then ``--seed``/``--offline``.

        Raises:
            click.UsageError: a ``--set`` string or a ``--config`` line is malformed.
        """
        try:
            config = apply_overrides(config, self.set_overrides)
            config = services.apply_config_files(config, self.config_files)
        except ValueError as exc:
            raise click.UsageError(str(exc)) from exc
        return merge_overrides(config, flag_overrides(seed=self.seed, offline=self.offline))

    def load(self, services: AppServices, profile: str | None) -> Config:
        """Read ``profile``'s layers, then :meth:`apply`.

        Raises:
            click.UsageError: the profile name is unusable or an override is malformed.
        """
        try:
            config = services.get_config(profile=profile, dotenv_path=self.env_file)
        except ValueError as exc:
            raise click.UsageError(f"--profile: {exc}") from exc
        return self.apply(services, config)


@dataclass(slots=True)
class CLIContext:
    """What every subcommand reads from ``ctx.obj``."""

    traceback: bool
    config: Config
    services: AppServices
    settings: AppSettings
    recipe: OverrideRecipe = field(default_factory=OverrideRecipe)
    profile: str | None = None

    def config_for(self, profile: str | None) -> tuple[Config, str | None]:
        """The stored configuration, or the same recipe rebuilt on ``profile``."""
        if not profile or profile == self.profile:
            return self.config, self.profile
        return self.recipe.load(self.services, profile), profile


def store_cli_context(ctx: click.Context, context: CLIContext) -> None:
    ctx.obj = context


def get_cli_context(ctx: click.Context) -> CLIContext:
    """Typed ``ctx.obj``.

    Raises:
        RuntimeError: the root group did not run (``ctx.obj`` is still the services factory).

    Example:
        >>> from unittest.mock import MagicMock
        >>> ctx = MagicMock()
        >>> ctx.obj = CLIContext(traceback=False, config=MagicMock(), services=MagicMock(), settings=MagicMock())
        >>> get_cli_context(ctx).recipe
        OverrideRecipe(set_overrides=(), config_files=(), seed=None, offline=False, env_file=None)
    """
    if not isinstance(ctx.obj, CLIContext):
        raise RuntimeError("CLI context not initialized; the root group stores it before any subcommand runs")
    return ctx.obj


class TracebackState(NamedTuple):
    """lib_cli_exit_tools traceback flags, captured so ``main`` can put them back."""

    enabled: bool
    force_color: bool

    @classmethod
    def capture(cls) -> TracebackState:
        config = lib_cli_exit_tools.config
        return cls(bool(getattr(config, "traceback", False)), bool(getattr(config, "traceback_force_color", False)))

    def restore(self) -> None:
        """Put the captured flags back.

        Example:
            >>> before = TracebackState.capture()
            >>> apply_traceback_preferences(not before.enabled)
            >>> before.restore()
            >>> TracebackState.capture() == before
            True
        """
        lib_cli_exit_tools.config.traceback = self.enabled
        lib_cli_exit_tools.config.traceback_force_color = self.force_color


def apply_traceback_preferences(enabled: bool) -> None:
    """Full, coloured tracebacks when ``enabled``; the short summary otherwise."""
    lib_cli_exit_tools.config.traceback = bool(enabled)
    lib_cli_exit_tools.config.traceback_force_color = bool(enabled)


__all__ = [
    "CLIContext",
    "OverrideRecipe",
    "TracebackState",
    "apply_traceback_preferences",
    "get_cli_context",
    "store_cli_context",
]

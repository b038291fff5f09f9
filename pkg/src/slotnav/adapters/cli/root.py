"""The ``slotnav`` group: global options, configuration, validated settings.

Before any subcommand runs, the group reads the profile's layers, applies the
:class:`~.context.OverrideRecipe` built from ``--set``, ``--config``, ``--seed``
and ``--offline``, starts logging and validates the sections into
:class:`~slotnav.adapters.config.settings.AppSettings`. A section that does
not validate ends the run with exit 78 before any work starts.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

import rich_click as click

from slotnav import __init__conf__
from slotnav.domain.errors import ContractError

from .context import CLIContext, OverrideRecipe, apply_traceback_preferences, store_cli_context
from .exit_codes import ExitCode
from .options import CLICK_CONTEXT_SETTINGS, INPUT_FILE, option, version_option

if TYPE_CHECKING:
    from collections.abc import Callable

    from slotnav.composition import AppServices


@click.group(help=__init__conf__.title, context_settings=CLICK_CONTEXT_SETTINGS, invoke_without_command=True)
@version_option(
    version=__init__conf__.version,
    prog_name=__init__conf__.shell_command,
    message=f"{__init__conf__.shell_command} version {__init__conf__.version}",
)
@option("--traceback/--no-traceback", default=False, help="Full Python traceback instead of the one-line summary")
@option("--profile", type=str, default=None, help="Configuration profile, e.g. 'desk' or 'lab'")
@option(
    "--set",
    "set_overrides",
    multiple=True,
    metavar="SECTION.KEY=VALUE",
    help="Override one setting, e.g. train.batch_size=2 (repeatable).",
)
@option(
    "--config",
    "config_files",
    multiple=True,
    type=INPUT_FILE,
    help="File of 'section.key = value' lines, applied after --set (repeatable).",
)
@option("--seed", type=click.IntRange(min=0), default=None, help="One seed for slots, captions and data order.")
@option("--offline", is_flag=True, default=False, help="Generate captions with the deterministic stub backend.")
@option("--env-file", type=INPUT_FILE, default=None, help="Read this .env file instead of searching upwards.")
@click.pass_context
def cli(
    ctx: click.Context,
    *,
    traceback: bool,
    profile: str | None,
    set_overrides: tuple[str, ...],
    config_files: tuple[str, ...],
    seed: int | None,
    offline: bool,
    env_file: str | None,
) -> None:
    """Build the per-invocation :class:`~.context.CLIContext`.

    ``ctx.obj`` arrives as the services factory (``build_production`` or
    ``build_testing``) and leaves as the context.

    Example:
        >>> from click.testing import CliRunner
        >>> from slotnav.composition import build_testing
        >>> CliRunner().invoke(cli, ["--help"], obj=build_testing).exit_code
        0
    """
    if not callable(ctx.obj):
        raise RuntimeError("no services factory in ctx.obj; call main(services_factory=...) or pass obj=")
    factory: Callable[[], AppServices] = ctx.obj
    services = factory()
    recipe = OverrideRecipe(
        set_overrides=set_overrides, config_files=config_files, seed=seed, offline=offline, env_file=env_file
    )
    config = recipe.load(services, profile)
    services.init_logging(config)
    try:
        settings = services.load_settings(config)
    except ContractError as exc:
        click.echo(f"error: config: {exc}", err=True)
        raise SystemExit(ExitCode.CONFIG_ERROR) from exc
    context = CLIContext(
        traceback=traceback, config=config, services=services, settings=settings, recipe=recipe, profile=profile
    )
    store_cli_context(ctx, context)
    apply_traceback_preferences(traceback)

    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())


def _register_commands() -> None:
    # command modules import this package, so they load after ``cli`` exists
    from . import commands  # noqa: PLC0415

    for command in (
        commands.cli_info,
        commands.cli_config,
        commands.cli_train,
        commands.cli_index,
        commands.cli_retrieve,
        commands.cli_eval_retrieval,
        commands.cli_augment,
        commands.cli_nav_eval,
        commands.cli_gradcheck,
    ):
        cli.add_command(command)


_register_commands()


__all__ = ["cli"]

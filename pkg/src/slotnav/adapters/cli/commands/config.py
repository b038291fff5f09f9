"""The ``config`` command: show the merged configuration or the validated settings."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Any

import lib_log_rich.runtime
import rich_click as click

from slotnav.domain.enums import OutputFormat
from slotnav.domain.errors import ContractError

from ..context import get_cli_context
from ..exit_codes import ExitCode
from ..options import CLICK_CONTEXT_SETTINGS, option
from ._common import emit_record

if TYPE_CHECKING:
    from slotnav.adapters.config.settings import AppSettings

logger = logging.getLogger(__name__)


def validated_sections(settings: AppSettings) -> dict[str, dict[str, Any]]:
    """Each model section as plain JSON values, defaults included.

    Example:
        >>> from slotnav.adapters.config.settings import AppSettings
        >>> sections = validated_sections(AppSettings())
        >>> sorted(sections)
        ['encoder', 'generation', 'navigation', 'objectives', 'train']
        >>> sections["objectives"]["match_cost"]
        'one_minus_giou'
    """
    train = settings.train.model_dump(mode="json", exclude={"encoder", "weights", "match_cost"})
    return {
        "encoder": settings.encoder.model_dump(mode="json"),
        "objectives": {**settings.weights.model_dump(mode="json"), "match_cost": settings.train.match_cost.value},
        "train": train,
        "navigation": settings.navigation.model_dump(mode="json"),
        "generation": settings.generation.model_dump(mode="json"),
    }


@click.command("config", context_settings=CLICK_CONTEXT_SETTINGS)
@option(
    "--format",
    "output_format",
    type=click.Choice([f.value for f in OutputFormat], case_sensitive=False),
    default=OutputFormat.HUMAN.value,
    help="Output format (human-readable or JSON)",
)
@option("--section", type=str, default=None, help="Show only one section (e.g. 'train', 'navigation')")
@option("--profile", type=str, default=None, help="Rebuild the configuration on another profile")
@option(
    "--validated",
    is_flag=True,
    default=False,
    help="Print the typed settings the commands run with (one JSON line per section).",
)
@click.pass_context
def cli_config(
    ctx: click.Context, *, output_format: str, section: str | None, profile: str | None, validated: bool
) -> None:
    """Display the merged configuration from all sources.

    Precedence: defaults -> app -> host -> user -> dotenv -> env -> --set ->
    --config -> --seed/--offline. A subcommand ``--profile`` reapplies the
    same root options on top of that profile.
    """
    cli_ctx = get_cli_context(ctx)
    fmt = OutputFormat(output_format.lower())
    extra = {"command": "config", "format": fmt.value, "profile": profile or cli_ctx.profile}
    with lib_log_rich.runtime.bind(job_id="cli-config", extra=extra):
        if validated:
            settings = cli_ctx.settings
            if profile and profile != cli_ctx.profile:
                try:
                    settings = cli_ctx.services.load_settings(cli_ctx.config_for(profile)[0])
                except ContractError as exc:
                    click.echo(f"error: config: {exc}", err=True)
                    raise SystemExit(ExitCode.CONFIG_ERROR) from exc
            _emit_validated(settings, section)
            return
        effective_config, effective_profile = cli_ctx.config_for(profile)
        logger.info("Displaying configuration", extra={"format": fmt.value, "section": section})
        try:
            cli_ctx.services.display_config(
                effective_config, output_format=fmt, section=section, profile=effective_profile
            )
        except ValueError as exc:
            click.echo(f"error: config: {exc}", err=True)
            raise SystemExit(ExitCode.INVALID_ARGUMENT) from exc


def _emit_validated(settings: AppSettings, section: str | None) -> None:
    sections = validated_sections(settings)
    if section is not None and section not in sections:
        click.echo(f"error: config: no validated section [{section}]; known: {', '.join(sections)}", err=True)
        raise SystemExit(ExitCode.INVALID_ARGUMENT)
    for name, values in sections.items():
        if section is None or name == section:
            emit_record({"section": name, **values})


__all__ = ["cli_config", "validated_sections"]

"""The ``info`` command: package metadata and the numeric stack it runs on."""

from __future__ import annotations

import logging

import lib_log_rich.runtime
import rich_click as click

from slotnav import __init__conf__
from slotnav.domain.enums import OutputFormat

from ..options import CLICK_CONTEXT_SETTINGS, option
from ._common import emit_record

logger = logging.getLogger(__name__)


@click.command("info", context_settings=CLICK_CONTEXT_SETTINGS)
@option(
    "--format",
    "output_format",
    type=click.Choice([f.value for f in OutputFormat], case_sensitive=False),
    default=OutputFormat.HUMAN.value,
    help="Aligned text block, or one JSON line for run logs",
)
def cli_info(output_format: str) -> None:
    """Print the package metadata plus the python, numpy and scipy versions.

    Example:
        >>> from click.testing import CliRunner
        >>> result = CliRunner().invoke(cli_info, ["--format", "json"])
        >>> result.exit_code, '"name":"slotnav"' in result.output
        (0, True)
    """
    fmt = OutputFormat(output_format.lower())
    with lib_log_rich.runtime.bind(job_id="cli-info", extra={"command": "info", "format": fmt.value}):
        logger.info("Displaying package information")
        if fmt is OutputFormat.JSON:
            emit_record(dict(__init__conf__.info_fields()))
        else:
            __init__conf__.print_info()


__all__ = ["cli_info"]

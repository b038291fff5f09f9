"""``config`` output: the merged layers rendered by lib_layered_config, with provenance."""

from __future__ import annotations

from typing import TYPE_CHECKING

import lib_log_rich.runtime
from lib_layered_config import OutputFormat as LayeredOutputFormat
from lib_layered_config import display_config as render_layers

from slotnav.domain.enums import OutputFormat

if TYPE_CHECKING:
    from lib_layered_config import Config
    from rich.console import Console


def display_config(
    config: Config,
    *,
    output_format: OutputFormat = OutputFormat.HUMAN,
    section: str | None = None,
    console: Console | None = None,
    profile: str | None = None,
) -> None:
    """Print ``config``, or only ``section``, after any queued log lines.

    ``console`` lets tests record the output; ``profile`` appears in the
    provenance comments of the human format.

    Raises:
        ValueError: ``section`` is not in the merged configuration.
    """
    if lib_log_rich.runtime.is_initialised():
        lib_log_rich.runtime.flush()
    render_layers(
        config,
        output_format=LayeredOutputFormat(output_format.value),
        section=section,
        profile=profile,
        console=console,
    )


__all__ = ["display_config"]

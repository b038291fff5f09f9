"""The ``augment`` command: detection records in, caption records out."""

from __future__ import annotations

import logging

import lib_log_rich.runtime
import rich_click as click

from slotnav.promptgen import convert_detection_file, write_records

from ..context import get_cli_context
from ..exit_codes import ExitCode
from ..options import CLICK_CONTEXT_SETTINGS, INPUT_FILE, OUTPUT_FILE, option
from ._common import emit_record, emit_table, reporting_errors

logger = logging.getLogger(__name__)


@click.command("augment", context_settings=CLICK_CONTEXT_SETTINGS)
@option(
    "--input",
    "input_path",
    type=INPUT_FILE,
    required=True,
    help="Detection records, one JSON object per line.",
)
@option("--out", "out_path", type=OUTPUT_FILE, required=True, help="Caption records to write.")
@option("--count", type=click.IntRange(min=1), default=None, help="Sentences per noun. Default: generation.sentences.")
@click.pass_context
def cli_augment(ctx: click.Context, *, input_path: str, out_path: str, count: int | None) -> None:
    """Add generated task sentences to every object of every detection record.

    Malformed lines are listed as ``file:line: reason`` on stderr; the good
    records are still written and the command exits 1.
    """
    generation = get_cli_context(ctx).settings.generation
    sentences = generation.sentences if count is None else count
    extra = {"command": "augment", "input": input_path, "count": sentences, "offline": generation.offline}
    with lib_log_rich.runtime.bind(job_id="cli-augment", extra=extra), reporting_errors("augment"):
        result = convert_detection_file(input_path, sentences, generation.client())
        write_records(out_path, result.records)
        record = {
            "records": len(result.records),
            "generated_captions": result.generated_captions,
            "errors": len(result.errors),
            "out": out_path,
        }
        emit_record(record)
        rows = [(len(result.records), result.generated_captions, len(result.errors))]
        emit_table("augment", ["records", "generated", "errors"], rows)
    if result.errors:
        for error in result.errors:
            click.echo(f"error: data: {error}", err=True)
        logger.warning("skipped malformed detection records", extra={"count": len(result.errors)})
        raise SystemExit(ExitCode.GENERAL_ERROR)


__all__ = ["cli_augment"]

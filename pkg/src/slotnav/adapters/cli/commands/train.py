"""The ``train`` command: a full run, or the overfit harness with ``--overfit``."""

from __future__ import annotations

import logging
from pathlib import Path

import lib_log_rich.runtime
import rich_click as click

from slotnav.autodiff import save_checkpoint
from slotnav.training import CHECKPOINT_NAME, desk_examples, load_examples, overfit_harness, train

from ..context import get_cli_context
from ..exit_codes import ExitCode
from ..options import CLICK_CONTEXT_SETTINGS, INPUT_DIR, INPUT_FILE, checkpoint_option, option
from ._common import emit_record, emit_table, model_parameters, reporting_errors

logger = logging.getLogger(__name__)


@click.command("train", context_settings=CLICK_CONTEXT_SETTINGS)
@option(
    "--records",
    type=INPUT_FILE,
    default=None,
    help="Caption records (JSON lines). Default: the bundled 8-scene desk set.",
)
@option(
    "--images",
    type=INPUT_DIR,
    default=None,
    help="Directory holding <image_id>.ppm for every record.",
)
@option("--out", "out_dir", type=click.Path(file_okay=False), default="run", show_default=True, help="Run directory.")
@option("--steps", type=click.IntRange(min=1), default=None, help="Override train.total_steps.")
@checkpoint_option("Start from these parameters.")
@option("--overfit", is_flag=True, default=False, help="Overfit one fixed batch and report convergence.")
@click.pass_context
def cli_train(
    ctx: click.Context,
    *,
    records: str | None,
    images: str | None,
    out_dir: str,
    steps: int | None,
    checkpoint: str | None,
    overfit: bool,
) -> None:
    """Train the image encoder; writes checkpoint.lzp, metrics.jsonl and manifest.json.

    With ``--overfit`` the harness trains on every example at once until the
    loss falls to a tenth of its start, then reports training-set AR@1; it
    exits 1 when the step budget runs out first.
    """
    cli_ctx = get_cli_context(ctx)
    config = cli_ctx.settings.train
    if steps is not None:
        config = config.model_copy(update={"total_steps": steps, "warmup_steps": min(config.warmup_steps, steps)})
    if (records is None) != (images is None):
        raise click.UsageError("--records and --images must be given together")

    extra = {"command": "train", "overfit": overfit, "steps": config.total_steps, "seed": config.seed}
    with lib_log_rich.runtime.bind(job_id="cli-train", extra=extra), reporting_errors("train"):
        examples = load_examples(records, images) if records and images else desk_examples()
        parameters = model_parameters(config.encoder, checkpoint)
        if overfit:
            report = overfit_harness(examples, config, parameters=parameters)
            save_checkpoint(_ensure_dir(out_dir) / CHECKPOINT_NAME, report.parameters)
            for step, losses in enumerate(report.losses):
                emit_record(losses.as_record(step))
            emit_record(report.as_record())
            emit_table("overfit", ["metric", "value"], list(report.as_record().items()))
            if not report.converged:
                logger.warning("overfit did not converge", extra={"steps": report.steps})
                raise SystemExit(ExitCode.GENERAL_ERROR)
            return
        run = train(examples, config, out_dir, parameters=parameters)
        for record in run.manifest.steps:
            emit_record(record.model_dump(mode="json"))
        last = run.manifest.steps[-1]
        emit_table(
            "training",
            ["steps", "L_C", "L_L1", "L_GIoU", "L_MC", "total"],
            [(len(run.manifest.steps), last.L_C, last.L_L1, last.L_GIoU, last.L_MC, last.total)],
        )


def _ensure_dir(path: str) -> Path:
    directory = Path(path)
    directory.mkdir(parents=True, exist_ok=True)
    return directory


__all__ = ["cli_train"]

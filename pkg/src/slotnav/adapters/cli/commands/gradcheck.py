"""The ``gradcheck`` command: finite differences against the full training loss."""

from __future__ import annotations

import logging

import lib_log_rich.runtime
import rich_click as click

from slotnav.autodiff import finite_difference_check
from slotnav.model import split_trainable
from slotnav.objectives import loss_graph
from slotnav.training import desk_examples, make_batch

from ..context import get_cli_context
from ..exit_codes import ExitCode
from ..options import CLICK_CONTEXT_SETTINGS, checkpoint_option, option
from ._common import emit_record, emit_table, model_parameters, reporting_errors

logger = logging.getLogger(__name__)


@click.command("gradcheck", context_settings=CLICK_CONTEXT_SETTINGS)
@option("--images", "image_count", type=click.IntRange(min=1, max=8), default=2, show_default=True, help="Batch size.")
@option("--step", type=click.FloatRange(min=0.0, min_open=True), default=1e-5, show_default=True, help="Perturbation.")
@option("--tolerance", type=click.FloatRange(min=0.0, min_open=True), default=1e-4, show_default=True)
@option(
    "--coordinates",
    type=click.IntRange(min=1),
    default=8,
    show_default=True,
    help="Coordinates sampled per parameter.",
)
@option("--all-coordinates", is_flag=True, default=False, help="Check every coordinate (slow).")
@checkpoint_option()
@click.pass_context
def cli_gradcheck(
    ctx: click.Context,
    *,
    image_count: int,
    step: float,
    tolerance: float,
    coordinates: int,
    all_coordinates: bool,
    checkpoint: str | None,
) -> None:
    """Compare analytic and central-difference gradients of the total loss on a desk batch.

    The softmax temperature is fixed to 1.0 so the contrastive terms stay well
    conditioned for the finite-difference quotient. Exits 1 when any trainable
    parameter exceeds ``--tolerance``.
    """
    config = get_cli_context(ctx).settings.train
    weights = config.weights.model_copy(update={"temperature": 1.0})
    extra = {"command": "gradcheck", "images": image_count, "step": step, "tolerance": tolerance}
    with lib_log_rich.runtime.bind(job_id="cli-gradcheck", extra=extra), reporting_errors("gradcheck"):
        parameters = model_parameters(config.encoder, checkpoint)
        trainable, text_parameters = split_trainable(parameters)
        batch = make_batch(desk_examples(), 0, config, text_parameters, indices=range(image_count))
        graph = loss_graph(
            batch, trainable, config.encoder, weights, slot_seed=config.seed, match_cost=config.match_cost
        )
        report = finite_difference_check(
            graph,
            "total",
            step=step,
            tolerance=tolerance,
            coordinates_per_parameter=None if all_coordinates else coordinates,
            seed=config.seed,
        )
        rows: list[tuple[str, float, int, int]] = []
        for name, check in sorted(report.parameters.items()):
            emit_record({"parameter": name, "max_error": check.max_error, "checked": check.checked})
            rows.append((name, check.max_error, check.checked, check.excluded))
        emit_record({"max_error": report.max_error, "tolerance": tolerance, "passed": report.passed})
        emit_table("gradient check", ["parameter", "max error", "checked", "excluded"], rows)
    if not report.passed:
        logger.warning("gradient check failed", extra={"failures": report.failures()})
        raise SystemExit(ExitCode.GENERAL_ERROR)


__all__ = ["cli_gradcheck"]

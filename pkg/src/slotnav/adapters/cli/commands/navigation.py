"""The ``nav-eval`` command: retrieval-then-navigate episodes and success rates."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import TYPE_CHECKING

import lib_log_rich.runtime
import orjson
import rich_click as click

from slotnav.domain.errors import DataFormatError
from slotnav.fixtures import load_world15, world15_encoder, world15_memory, world15_queries
from slotnav.navsim import (
    LookupEncoder,
    TextModelEncoder,
    evaluate_navigation,
    load_world,
    read_memory,
    read_nav_queries,
    write_episode_log,
)
from slotnav.promptgen import PromptTemplate

from ..context import get_cli_context
from ..options import CLICK_CONTEXT_SETTINGS, INPUT_FILE, OUTPUT_FILE, checkpoint_option, option
from ._common import emit_record, emit_table, model_parameters, reporting_errors

if TYPE_CHECKING:
    from slotnav.adapters.config.settings import AppSettings
    from slotnav.navsim import QueryEncoder

logger = logging.getLogger(__name__)


def _lookup_encoder(path: str) -> LookupEncoder:
    try:
        table = orjson.loads(Path(path).read_bytes())
    except orjson.JSONDecodeError as exc:
        raise DataFormatError(f"invalid JSON: {exc}", path=path) from exc
    if not isinstance(table, dict):
        raise DataFormatError("expected an object mapping query text to embedding", path=path)
    return LookupEncoder(table)


def _query_encoder(
    settings: AppSettings, *, encoder: str | None, checkpoint: str | None, bundled: bool
) -> QueryEncoder:
    if encoder:
        return _lookup_encoder(encoder)
    if bundled and checkpoint is None:
        return world15_encoder()
    parameters = model_parameters(settings.encoder, checkpoint)
    return TextModelEncoder(parameters, settings.encoder, PromptTemplate(settings.train.prompt_style))


@click.command("nav-eval", context_settings=CLICK_CONTEXT_SETTINGS)
@option("--world", type=INPUT_FILE, default=None, help="World file (grid + objects).")
@option("--memory", type=INPUT_FILE, default=None, help="Image-pose memory (JSON lines).")
@option("--queries", type=INPUT_FILE, default=None, help="Queries (JSON lines).")
@option("--encoder", type=INPUT_FILE, default=None, help="Query -> embedding JSON table.")
@checkpoint_option("Encode queries with a model.")
@option("--k", type=click.IntRange(min=1), default=None, help="Override navigation.k.")
@option("--occlusion/--no-occlusion", default=None, help="Override navigation.occlusion.")
@option("--log", "log_path", type=OUTPUT_FILE, default=None, help="Write the episode log here.")
@click.pass_context
def cli_nav_eval(
    ctx: click.Context,
    *,
    world: str | None,
    memory: str | None,
    queries: str | None,
    encoder: str | None,
    checkpoint: str | None,
    k: int | None,
    occlusion: bool | None,
    log_path: str | None,
) -> None:
    """Run every query through retrieval and navigation; report SR at each radius.

    Without ``--world``, ``--memory`` and ``--queries`` the bundled 15x15
    two-room world is used with its fixed query embeddings.
    """
    given = [value is not None for value in (world, memory, queries)]
    if any(given) and not all(given):
        raise click.UsageError("--world, --memory and --queries must be given together")
    if encoder and checkpoint:
        raise click.UsageError("--encoder and --checkpoint are mutually exclusive")
    settings = get_cli_context(ctx).settings
    overrides = {key: value for key, value in (("k", k), ("occlusion", occlusion)) if value is not None}
    navigation = settings.navigation.model_copy(update=overrides)
    extra = {"command": "nav-eval", "k": navigation.k, "occlusion": navigation.occlusion}
    with lib_log_rich.runtime.bind(job_id="cli-nav-eval", extra=extra), reporting_errors("nav-eval"):
        if world and memory and queries:
            grid = load_world(world, cell_m=navigation.cell_m)
            entries, requests = read_memory(memory), read_nav_queries(queries)
        else:
            grid, entries, requests = load_world15(cell_m=navigation.cell_m), world15_memory(), world15_queries()
        query_encoder = _query_encoder(settings, encoder=encoder, checkpoint=checkpoint, bundled=world is None)
        evaluation = evaluate_navigation(requests, entries, grid, query_encoder, navigation)
        for episode in evaluation.episodes:
            emit_record(episode.as_record())
        for report in evaluation.reports:
            emit_record(report.as_record())
        if log_path:
            write_episode_log(log_path, evaluation.episodes)
        rows = [
            (f"{report.radius:g} m", report.success_rate, report.fov_rate, report.episodes)
            for report in evaluation.reports
        ]
        logger.info("navigation evaluated", extra={"episodes": len(evaluation.episodes), "world": world or "world15"})
        emit_table("navigation", ["radius", "SR", "FOV rate", "episodes"], rows)


__all__ = ["cli_nav_eval"]

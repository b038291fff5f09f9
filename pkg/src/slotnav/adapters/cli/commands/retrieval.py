"""The ``index``, ``retrieve`` and ``eval-retrieval`` commands."""

from __future__ import annotations

import logging
from pathlib import Path

import lib_log_rich.runtime
import numpy as np
import rich_click as click

from slotnav.domain.errors import DataFormatError
from slotnav.fixtures import desk_scenes, orthonormal_retrieval
from slotnav.model import constants, embed_images, encode_texts, read_ppm
from slotnav.navsim import TextModelEncoder
from slotnav.promptgen import PromptTemplate
from slotnav.retrieval import (
    build_index,
    evaluate_retrieval,
    read_embeddings,
    read_ground_truth,
    similarity,
    write_embeddings,
)

from ..context import get_cli_context
from ..options import CLICK_CONTEXT_SETTINGS, INPUT_DIR, INPUT_FILE, OUTPUT_FILE, checkpoint_option, option
from ._common import emit_record, emit_table, model_parameters, read_lines, reporting_errors

logger = logging.getLogger(__name__)


def _image_folder(directory: str) -> tuple[list[str], np.ndarray]:
    paths = sorted(Path(directory).glob("*.ppm"))
    if not paths:
        raise DataFormatError("no .ppm images found", path=directory)
    return [path.stem for path in paths], np.stack([read_ppm(path) for path in paths])


def _text_table(path: str) -> tuple[list[str], list[str]]:
    ids: list[str] = []
    texts: list[str] = []
    for number, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        item, tab, text = line.partition("\t")
        if not tab or not item.strip() or not text.strip():
            raise DataFormatError("expected '<id>\\t<text>'", path=path, line=number)
        ids.append(item.strip())
        texts.append(text.strip())
    return ids, texts


@click.command("index", context_settings=CLICK_CONTEXT_SETTINGS)
@option("--out", "out_path", type=OUTPUT_FILE, required=True, help="LZE1 file to write.")
@option(
    "--images",
    type=INPUT_DIR,
    default=None,
    help="Directory of .ppm images (ids are file stems). Default: the bundled desk scenes.",
)
@option(
    "--texts",
    type=INPUT_FILE,
    default=None,
    help="Index texts instead: one '<id><TAB><text>' per line.",
)
@checkpoint_option()
@click.pass_context
def cli_index(
    ctx: click.Context, *, out_path: str, images: str | None, texts: str | None, checkpoint: str | None
) -> None:
    """Embed images (or texts) and write them as an LZE1 embedding file."""
    if images and texts:
        raise click.UsageError("--images and --texts are mutually exclusive")
    settings = get_cli_context(ctx).settings
    extra = {"command": "index", "out": out_path}
    with lib_log_rich.runtime.bind(job_id="cli-index", extra=extra), reporting_errors("index"):
        parameters = model_parameters(settings.encoder, checkpoint)
        if texts:
            ids, lines = _text_table(texts)
            matrix = encode_texts(lines, constants(parameters), settings.encoder)
        elif images:
            ids, pixels = _image_folder(images)
            matrix = embed_images(pixels, parameters, settings.encoder, seed=settings.train.seed)
        else:
            scenes = desk_scenes()
            ids = [scene.image_id for scene in scenes]
            pixels = np.stack([scene.image for scene in scenes])
            matrix = embed_images(pixels, parameters, settings.encoder, seed=settings.train.seed)
        index = build_index(matrix, ids)
        write_embeddings(out_path, index)
        record = {"path": out_path, "items": len(index), "dim": index.dim}
        emit_record(record)
        emit_table("index", ["path", "items", "dim"], [(out_path, len(index), index.dim)])


@click.command("retrieve", context_settings=CLICK_CONTEXT_SETTINGS)
@option("--index", "index_path", type=INPUT_FILE, required=True, help="LZE1 image index.")
@option("--query", "queries", multiple=True, help="Query text (repeatable).")
@option("--queries", "queries_file", type=INPUT_FILE, default=None, help="One per line.")
@option("--k", type=click.IntRange(min=1), default=5, show_default=True, help="Results per query.")
@checkpoint_option()
@click.pass_context
def cli_retrieve(
    ctx: click.Context,
    *,
    index_path: str,
    queries: tuple[str, ...],
    queries_file: str | None,
    k: int,
    checkpoint: str | None,
) -> None:
    """Rank the indexed images for each query with the frozen text encoder."""
    settings = get_cli_context(ctx).settings
    extra = {"command": "retrieve", "index": index_path, "k": k}
    with lib_log_rich.runtime.bind(job_id="cli-retrieve", extra=extra), reporting_errors("retrieve"):
        texts = list(queries) + (read_lines(queries_file) if queries_file else [])
        if not texts:
            raise click.UsageError("give at least one --query or a --queries file")
        index = read_embeddings(index_path)
        parameters = model_parameters(settings.encoder, checkpoint)
        encoder = TextModelEncoder(parameters, settings.encoder, PromptTemplate(settings.train.prompt_style))
        scores = similarity(np.stack([encoder(text) for text in texts]), index)
        rows: list[tuple[str, str, float]] = []
        for text, row in zip(texts, scores, strict=True):
            ranked = [int(position) for position in index.order(row)[: min(k, len(index))]]
            results = [{"id": index.ids[position], "score": float(row[position])} for position in ranked]
            emit_record({"query": text, "results": results})
            rows.append((text, results[0]["id"], results[0]["score"]))
        emit_table("retrieval", ["query", "top-1", "score"], rows)


@click.command("eval-retrieval", context_settings=CLICK_CONTEXT_SETTINGS)
@option("--texts", type=INPUT_FILE, default=None, help="LZE1 text embeddings.")
@option("--images", type=INPUT_FILE, default=None, help="LZE1 image embeddings.")
@option(
    "--ground-truth",
    "ground_truth",
    type=INPUT_FILE,
    default=None,
    help="TSV of '<text_id><TAB><image_id>' pairs.",
)
@option("--k", "ks", type=click.IntRange(min=1), multiple=True, default=(1, 5), show_default=True, help="Cut-offs.")
def cli_eval_retrieval(
    *, texts: str | None, images: str | None, ground_truth: str | None, ks: tuple[int, ...]
) -> None:
    """Average recall in both directions; without inputs, on the orthonormal fixture."""
    given = [value is not None for value in (texts, images, ground_truth)]
    if any(given) and not all(given):
        raise click.UsageError("--texts, --images and --ground-truth must be given together")
    extra = {"command": "eval-retrieval", "k": list(ks)}
    with lib_log_rich.runtime.bind(job_id="cli-eval-retrieval", extra=extra), reporting_errors("eval-retrieval"):
        if texts and images and ground_truth:
            text_index, image_index = read_embeddings(texts), read_embeddings(images)
            truth = read_ground_truth(ground_truth)
        else:
            fixture = orthonormal_retrieval()
            text_index, image_index, truth = fixture.texts, fixture.images, fixture.ground_truth
        evaluation = evaluate_retrieval(text_index, image_index, truth, ks)
        record = evaluation.as_record()
        emit_record(record)
        emit_table("average recall", ["metric", "value"], list(record.items()))
        if evaluation.text_to_image.missing:
            logger.warning("queries without ground truth", extra={"count": len(evaluation.text_to_image.missing)})


__all__ = ["cli_eval_retrieval", "cli_index", "cli_retrieve"]

"""Retrieval quality of each prompt template on captioned records."""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass

from ..autodiff import Array
from ..domain.enums import PromptStyle
from ..domain.errors import ContractError
from ..retrieval import EmbeddingIndex, GroundTruth, average_recall, build_index, rank_all
from .dataset import CaptionRecord
from .templates import SEPARATOR, render_prompt

#: ``encode(texts) -> (len(texts), D)`` embeddings
TextEncoder = Callable[[Sequence[str]], Array]


@dataclass(frozen=True, slots=True)
class TemplateReport:
    """AR@k per prompt style over the same query set."""

    recall: dict[PromptStyle, float]
    k: int
    queries: int

    def as_record(self) -> dict[str, float | int]:
        return {"k": self.k, "queries": self.queries, **{style.value: value for style, value in self.recall.items()}}


def template_queries(records: Sequence[CaptionRecord]) -> list[tuple[str, str, str | None]]:
    """``(query id, noun, sentence)`` for every caption; the bare noun caption has no sentence."""
    queries: list[tuple[str, str, str | None]] = []
    for record in records:
        for index, obj in enumerate(record.objects):
            for number, caption in enumerate(obj.captions):
                sentence = None if caption.strip() == obj.noun else caption
                queries.append((f"{record.image_id}/{index}/{number}", obj.noun, sentence))
    return queries


def noun_ground_truth(records: Sequence[CaptionRecord]) -> GroundTruth:
    """Every query is correct for every image that contains its noun."""
    images_by_noun: dict[str, set[str]] = {}
    for record in records:
        for noun in record.nouns:
            images_by_noun.setdefault(noun, set()).add(record.image_id)
    return GroundTruth.from_pairs(
        (query, image) for query, noun, _ in template_queries(records) for image in sorted(images_by_noun[noun])
    )


def noun_gallery(records: Sequence[CaptionRecord], encode: TextEncoder) -> EmbeddingIndex:
    """Stand-in image memory: each image embedded as the text of its joined nouns."""
    texts = [SEPARATOR.join(record.nouns) for record in records]
    return build_index(encode(texts), [record.image_id for record in records])


def prompt_template_report(
    records: Sequence[CaptionRecord],
    encode: TextEncoder,
    gallery: EmbeddingIndex | None = None,
    *,
    k: int = 1,
    styles: Sequence[PromptStyle] = tuple(PromptStyle),
) -> TemplateReport:
    """Text-to-image AR@k of the same queries rendered in each ``style``.

    Args:
        records: captioned images; their ids must be in ``gallery``.
        encode: text encoder used for the queries.
        gallery: image embeddings; defaults to :func:`noun_gallery`.
        k: recall cut-off.
        styles: templates to compare.
    """
    if not records:
        raise ContractError("prompt_template_report needs at least one record")
    images = gallery if gallery is not None else noun_gallery(records, encode)
    truth = noun_ground_truth(records)
    truth.check_ids(images)
    queries = template_queries(records)
    ids = [query for query, _, _ in queries]
    recall: dict[PromptStyle, float] = {}
    for style in styles:
        texts = [render_prompt(noun, sentence, style) for _, noun, sentence in queries]
        index = build_index(encode(texts), ids)
        recall[style] = average_recall(rank_all(index, images, k), truth, k).at(k)
    return TemplateReport(recall=recall, k=k, queries=len(queries))


__all__ = [
    "TemplateReport",
    "TextEncoder",
    "noun_gallery",
    "noun_ground_truth",
    "prompt_template_report",
    "template_queries",
]

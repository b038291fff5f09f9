"""Average recall at k under multi-label correspondence."""

from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from ..domain.errors import ContractError
from .index import EmbeddingIndex, similarity

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class GroundTruth:
    """Correct item ids per query; a query may match many items and vice versa.

    Example:
        >>> gt = GroundTruth.from_pairs([("q1", "img1"), ("q1", "img2"), ("q2", "img2")])
        >>> sorted(gt.targets("q1")), sorted(gt.inverted().targets("img2"))
        (['img1', 'img2'], ['q1', 'q2'])
    """

    matches: Mapping[str, frozenset[str]] = field(default_factory=lambda: {})

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str]]) -> GroundTruth:
        grouped: dict[str, set[str]] = {}
        for query, item in pairs:
            grouped.setdefault(query, set()).add(item)
        return cls({query: frozenset(items) for query, items in grouped.items()})

    def __contains__(self, query: object) -> bool:
        return query in self.matches

    def __len__(self) -> int:
        return len(self.matches)

    def targets(self, query: str) -> frozenset[str]:
        return self.matches.get(query, frozenset())

    def pairs(self) -> list[tuple[str, str]]:
        """All ``(query, item)`` pairs in sorted order."""
        return sorted((query, item) for query, items in self.matches.items() for item in items)

    def inverted(self) -> GroundTruth:
        """Swap roles: items become queries (image-to-text evaluation)."""
        return GroundTruth.from_pairs((item, query) for query, item in self.pairs())

    def check_ids(self, items: EmbeddingIndex) -> None:
        """Raise :class:`ContractError` if a referenced item is not in ``items``."""
        unknown = sorted({item for _, item in self.pairs() if item not in items})
        if unknown:
            raise ContractError(f"ground truth references unknown ids: {', '.join(unknown)}")


@dataclass(frozen=True, slots=True)
class RecallReport:
    """AR@k for each requested k plus per-query detail.

    Attributes:
        recall: ``k -> AR@k``.
        first_hit: per query, 1-based rank of its first correct result, ``None`` if none.
        missing: queries that had no ground-truth entry.
    """

    recall: dict[int, float]
    first_hit: dict[str, int | None]
    missing: tuple[str, ...] = ()

    def at(self, k: int) -> float:
        if k not in self.recall:
            raise ContractError(f"AR@{k} was not computed (have {sorted(self.recall)})")
        return self.recall[k]

    def hits(self, k: int) -> dict[str, bool]:
        """Per-query hit flag at ``k``."""
        return {query: rank is not None and rank <= k for query, rank in self.first_hit.items()}


def _ks(k: int | Sequence[int]) -> list[int]:
    ks = sorted({k} if isinstance(k, int) else set(k))
    if not ks or ks[0] < 1:
        raise ContractError(f"k values must be >= 1, got {ks}")
    return ks


def average_recall(
    results: Mapping[str, Sequence[str]],
    ground_truth: GroundTruth,
    k: int | Sequence[int],
) -> RecallReport:
    """Fraction of queries with a correct id among their first ``k`` results.

    A query absent from ``ground_truth`` counts as never hit and is reported
    with a warning.

    Raises:
        ContractError: no queries, invalid ``k`` or a query with fewer than ``k`` results.

    Example:
        >>> gt = GroundTruth.from_pairs([("a", "x"), ("b", "z")])
        >>> average_recall({"a": ["x", "y", "z"], "b": ["x", "y", "z"]}, gt, [1, 5])
        Traceback (most recent call last):
        ...
        slotnav.domain.errors.ContractError: query 'a' has 3 results, fewer than k=5
        >>> average_recall({"a": ["x", "y", "z"], "b": ["x", "y", "z"]}, gt, [1, 3]).recall
        {1: 0.5, 3: 1.0}
    """
    ks = _ks(k)
    if not results:
        raise ContractError("average_recall needs at least one query")
    first_hit: dict[str, int | None] = {}
    missing: list[str] = []
    for query, ranked in results.items():
        if len(ranked) < ks[-1]:
            raise ContractError(f"query {query!r} has {len(ranked)} results, fewer than k={ks[-1]}")
        if query not in ground_truth:
            logger.warning("query has no ground truth; counted as a miss", extra={"query": query})
            missing.append(query)
        targets = ground_truth.targets(query)
        first_hit[query] = next((rank for rank, item in enumerate(ranked, start=1) if item in targets), None)
    total = len(first_hit)
    recall = {
        value: sum(1 for rank in first_hit.values() if rank is not None and rank <= value) / total for value in ks
    }
    return RecallReport(recall=recall, first_hit=first_hit, missing=tuple(missing))


def rank_all(
    queries: EmbeddingIndex, items: EmbeddingIndex, k: int, subset: Iterable[str] | None = None
) -> dict[str, list[str]]:
    """Top-``k`` item ids for each query row (optionally only ``subset`` of queries)."""
    if not 1 <= k <= len(items):
        raise ContractError(f"k must be between 1 and {len(items)}, got {k}")
    names = list(queries.ids if subset is None else subset)
    if not names:
        return {}
    scores = similarity([queries.row(name) for name in names], items)
    return {name: [items.ids[int(row)] for row in items.order(scores[index])[:k]] for index, name in enumerate(names)}


@dataclass(frozen=True, slots=True)
class RetrievalEvaluation:
    """AR@k in both directions."""

    text_to_image: RecallReport
    image_to_text: RecallReport

    def as_record(self) -> dict[str, float]:
        record = {f"t2i_AR@{k}": value for k, value in self.text_to_image.recall.items()}
        record.update({f"i2t_AR@{k}": value for k, value in self.image_to_text.recall.items()})
        return record


def evaluate_retrieval(
    texts: EmbeddingIndex,
    images: EmbeddingIndex,
    ground_truth: GroundTruth,
    k: int | Sequence[int] = (1, 5),
) -> RetrievalEvaluation:
    """Text-to-image AR@k over every text row and image-to-text AR@k over every annotated image.

    An image counts as an image-to-text hit when any correct text is among its
    first ``k`` texts.
    """
    ks = _ks(k)
    ground_truth.check_ids(images)
    inverse = ground_truth.inverted()
    inverse.check_ids(texts)
    forward = average_recall(rank_all(texts, images, ks[-1]), ground_truth, ks)
    annotated = [item for item in images.ids if item in inverse]
    if not annotated:
        raise ContractError("no image is referenced by the ground truth")
    backward = average_recall(rank_all(images, texts, ks[-1], annotated), inverse, ks)
    return RetrievalEvaluation(text_to_image=forward, image_to_text=backward)


__all__ = [
    "GroundTruth",
    "RecallReport",
    "RetrievalEvaluation",
    "average_recall",
    "evaluate_retrieval",
    "rank_all",
]

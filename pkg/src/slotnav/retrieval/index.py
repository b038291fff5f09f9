"""Exact dot-product search over unit-norm embedding rows.

Scores are computed in float64 on the full matrix; there is no approximate
structure. Equal scores order by ascending id (plain string order), so a
ranking never depends on row order.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike

from ..autodiff import Array
from ..domain.errors import ContractError

#: Largest accepted deviation of a stored row norm from one.
NORM_TOLERANCE = 1e-6


@dataclass(frozen=True, slots=True, eq=False)
class EmbeddingIndex:
    """Immutable ``(N, D)`` matrix of unit rows with one id per row.

    Build it with :func:`build_index`, which normalises rows and checks ids.
    """

    matrix: Array = field(repr=False)
    ids: tuple[str, ...]
    _position: dict[str, int] = field(init=False, repr=False, compare=False)
    _id_rank: Array = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.matrix.ndim != 2 or self.matrix.shape[0] != len(self.ids):  # noqa: PLR2004
            raise ContractError(f"index matrix {self.matrix.shape} does not match {len(self.ids)} ids")
        norms = np.linalg.norm(self.matrix, axis=1)
        if norms.size and np.abs(norms - 1.0).max() > NORM_TOLERANCE:
            raise ContractError("index rows must have unit norm; use build_index")
        self.matrix.setflags(write=False)
        object.__setattr__(self, "_position", {item: row for row, item in enumerate(self.ids)})
        order = np.argsort(np.array(self.ids, dtype=object), kind="stable")
        rank = np.empty(len(self.ids), dtype=np.float64)
        rank[order] = np.arange(len(self.ids))
        object.__setattr__(self, "_id_rank", rank)

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[1])

    def row(self, item: str) -> Array:
        """Embedding stored for ``item``."""
        if item not in self._position:
            raise ContractError(f"id {item!r} is not in the index")
        return self.matrix[self._position[item]]

    def __contains__(self, item: object) -> bool:
        return item in self._position

    def order(self, scores: Array) -> Array:
        """Row indices by descending score, ties by ascending id."""
        return np.lexsort((self._id_rank, -scores))


def _unit_rows(values: Array, what: str) -> Array:
    norms = np.linalg.norm(values, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        raise ContractError(f"{what} contain a zero vector")
    return values / norms


def build_index(embeddings: ArrayLike, ids: Iterable[str], *, renormalize: bool = True) -> EmbeddingIndex:
    """Normalise ``embeddings`` row-wise and pair them with ``ids``.

    With ``renormalize=False`` rows already within :data:`NORM_TOLERANCE` of
    unit norm are stored unchanged, so values read from disk survive a
    write-read cycle bit for bit.

    Raises:
        ContractError: count mismatch, duplicate ids, zero rows or a non-matrix input.

    Example:
        >>> index = build_index([[3.0, 4.0], [0.0, 2.0]], ["a", "b"])
        >>> index.matrix.tolist(), index.ids
        ([[0.6, 0.8], [0.0, 1.0]], ('a', 'b'))
    """
    values = np.asarray(embeddings, dtype=np.float64)
    names = tuple(str(item) for item in ids)
    if values.ndim != 2:  # noqa: PLR2004
        raise ContractError(f"embeddings must be a (N, D) matrix, got shape {values.shape}")
    if values.shape[0] != len(names):
        raise ContractError(f"{values.shape[0]} embeddings for {len(names)} ids")
    if len(set(names)) != len(names):
        duplicates = sorted({name for name in names if names.count(name) > 1})
        raise ContractError(f"duplicate ids: {', '.join(duplicates)}")
    if not np.all(np.isfinite(values)):
        raise ContractError("embeddings contain non-finite values")
    if not renormalize and np.abs(np.linalg.norm(values, axis=1) - 1.0).max(initial=0.0) <= NORM_TOLERANCE:
        return EmbeddingIndex(matrix=values.copy(), ids=names)
    return EmbeddingIndex(matrix=_unit_rows(values, "embeddings"), ids=names)


def similarity(queries: ArrayLike, index: EmbeddingIndex) -> Array:
    """``(M, N)`` cosine similarities of normalised ``queries`` against every index row."""
    values = np.atleast_2d(np.asarray(queries, dtype=np.float64))
    if values.ndim != 2 or values.shape[1] != index.dim:  # noqa: PLR2004
        raise ContractError(f"queries of shape {values.shape} do not match index dimension {index.dim}")
    return _unit_rows(values, "queries") @ index.matrix.T


def topk(query: ArrayLike, index: EmbeddingIndex, k: int) -> list[str]:
    """Ids of the ``k`` rows most similar to ``query``, best first."""
    if not 1 <= k <= len(index):
        raise ContractError(f"k must be between 1 and {len(index)}, got {k}")
    scores = similarity(query, index)[0]
    return [index.ids[int(row)] for row in index.order(scores)[:k]]


def topk_images(query: ArrayLike, index: EmbeddingIndex, k: int) -> list[str]:
    """Text-to-image retrieval: the ``k`` images best matching a query embedding.

    Example:
        >>> images = build_index(np.eye(3), ["i0", "i1", "i2"])
        >>> topk_images([0.1, 0.9, 0.5], images, 2)
        ['i1', 'i2']
    """
    return topk(query, index, k)


def topk_texts(image: ArrayLike, index: EmbeddingIndex, k: int) -> list[str]:
    """Image-to-text retrieval: the ``k`` texts best matching an image embedding."""
    return topk(image, index, k)


__all__ = [
    "NORM_TOLERANCE",
    "EmbeddingIndex",
    "build_index",
    "similarity",
    "topk",
    "topk_images",
    "topk_texts",
]

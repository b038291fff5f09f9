"""Self-retrieval fixture with mutually orthogonal embeddings."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..domain.errors import ContractError
from ..retrieval import EmbeddingIndex, GroundTruth, build_index


@dataclass(frozen=True, slots=True)
class OrthonormalFixture:
    texts: EmbeddingIndex
    images: EmbeddingIndex
    ground_truth: GroundTruth


def orthonormal_retrieval(count: int = 8) -> OrthonormalFixture:
    """Text ``q{i}`` and image ``img{i}`` share the one-hot embedding ``e_i``.

    Example:
        >>> fixture = orthonormal_retrieval(3)
        >>> fixture.images.ids, sorted(fixture.ground_truth.targets("q1"))
        (('img0', 'img1', 'img2'), ['img1'])
    """
    if count < 1:
        raise ContractError(f"count must be >= 1, got {count}")
    basis = np.eye(count)
    texts = build_index(basis, [f"q{index}" for index in range(count)])
    images = build_index(basis, [f"img{index}" for index in range(count)])
    truth = GroundTruth.from_pairs((f"q{index}", f"img{index}") for index in range(count))
    return OrthonormalFixture(texts=texts, images=images, ground_truth=truth)


__all__ = ["OrthonormalFixture", "orthonormal_retrieval"]

"""Image-text contrastive losses.

``contrastive_loss`` is the symmetric batch cross-entropy between image
embeddings and the embeddings of each image's concatenated captions.
``multilabel_contrastive_loss`` ties every matched slot to the text of the
annotation it was matched with.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from ..autodiff import Array, Tensor, ops, scope
from ..domain.errors import ContractError
from ..model.heads import project_slots
from ..model.layers import Params, swap_last
from .matching import Assignment

CAPTION_SEPARATOR = ". "


def contrastive_loss(images: Tensor, texts: Tensor | ArrayLike, temperature: float) -> Tensor:
    """Symmetric softmax cross-entropy of ``images @ texts.T / temperature`` with diagonal targets.

    Raises:
        ContractError: empty batch, mismatched shapes or non-positive temperature.

    Example:
        >>> loss = contrastive_loss(Tensor(np.eye(2)), np.eye(2), 1.0)
        >>> round(loss.item(), 5)
        0.31326
    """
    text = texts if isinstance(texts, Tensor) else Tensor(texts)
    if temperature <= 0:
        raise ContractError(f"temperature must be positive, got {temperature}")
    if images.ndim != 2 or images.shape != text.shape:  # noqa: PLR2004
        raise ContractError(f"contrastive_loss needs equal (B, D) inputs, got {images.shape} and {text.shape}")
    batch = images.shape[0]
    if batch == 0:
        raise ContractError("contrastive_loss needs at least one pair")
    targets = np.arange(batch)
    with scope("contrastive"):
        logits = (images @ swap_last(text)) * (1.0 / temperature)
        return (ops.cross_entropy(logits, targets) + ops.cross_entropy(swap_last(logits), targets)) * 0.5


def concat_captions(captions: Sequence[str], seed: int) -> str:
    """Join ``captions`` in a seeded random order with ``". "``.

    Example:
        >>> concat_captions(["sofa"], 3)
        'sofa'
        >>> concat_captions(["sofa", "lamp"], 0) == concat_captions(["sofa", "lamp"], 0)
        True
    """
    if not captions:
        raise ContractError("concat_captions needs at least one caption")
    order = np.random.default_rng(seed).permutation(len(captions))
    return CAPTION_SEPARATOR.join(captions[int(index)] for index in order)


@dataclass(frozen=True, slots=True)
class MultiLabelResult:
    """Loss plus bookkeeping.

    Attributes:
        loss: scalar tensor; ``0`` when nothing was matched.
        matched: number of matched slots that contributed.
        empty: ``True`` when no slot was matched.
    """

    loss: Tensor
    matched: int
    empty: bool


def multilabel_contrastive_loss(
    slots: Tensor,
    text_embeddings: Sequence[ArrayLike],
    assignments: Sequence[Assignment],
    params: Params,
    temperature: float,
    *,
    texts: Sequence[Sequence[str]] | None = None,
) -> MultiLabelResult:
    """Cross-entropy of each matched slot against every annotation text of the batch.

    Each matched slot is projected to ``D`` through its block of the
    aggregation linear map and normalised; logits against all annotation text
    embeddings of the batch, scaled by ``1 / temperature``, are scored with the
    assigned annotation as target. The result is the mean over matched slots.
    With ``texts`` given the columns are the distinct caption strings of the
    batch: a caption repeated across images is one column, the target of every
    slot matched to it and never a negative for any of them.

    Args:
        slots: ``(B, K, D_s)`` final slots (``(K, D_s)`` is treated as ``B = 1``).
        text_embeddings: per image, ``(N_b, D)`` embeddings of its annotations.
        assignments: per image, the slot-to-annotation matching.
        params: encoder parameters (the aggregation weights are used).
        temperature: softmax temperature.
        texts: per image, the annotation strings. When given, identical strings
            share one logit column so a text repeated across images is not its
            own negative.
    """
    if temperature <= 0:
        raise ContractError(f"temperature must be positive, got {temperature}")
    batched = slots if slots.ndim == 3 else slots.reshape(1, *slots.shape)  # noqa: PLR2004
    if len(text_embeddings) != batched.shape[0] or len(assignments) != batched.shape[0]:
        raise ContractError(
            f"need one text block and one assignment per image, got {len(text_embeddings)} and "
            f"{len(assignments)} for {batched.shape[0]} images"
        )
    blocks = [np.atleast_2d(np.asarray(block, dtype=np.float64)) for block in text_embeddings]
    columns, targets, picks = _columns(blocks, assignments, texts, batched.shape[1])
    if not picks:
        return MultiLabelResult(loss=Tensor(0.0), matched=0, empty=True)
    with scope("multilabel"):
        projected = ops.l2_normalize(project_slots(batched, params, picks), axis=-1)
        logits = (projected @ Tensor(columns.T)) * (1.0 / temperature)
        return MultiLabelResult(loss=ops.cross_entropy(logits, targets), matched=len(picks), empty=False)


def _columns(
    blocks: Sequence[Array],
    assignments: Sequence[Assignment],
    texts: Sequence[Sequence[str]] | None,
    slot_count: int,
) -> tuple[Array, list[int], list[tuple[int, int]]]:
    rows: list[Array] = []
    column_of: dict[str, int] = {}
    targets: list[int] = []
    picks: list[tuple[int, int]] = []
    for image, (block, assignment) in enumerate(zip(blocks, assignments, strict=True)):
        local: list[int] = []
        for index, row in enumerate(block):
            key = texts[image][index] if texts is not None else f"{image}:{index}"
            if key not in column_of:
                column_of[key] = len(rows)
                rows.append(row)
            local.append(column_of[key])
        for slot, annotation in assignment.pairs:
            if not 0 <= slot < slot_count or not 0 <= annotation < len(local):
                raise ContractError(f"assignment pair {(slot, annotation)} out of range for image {image}")
            picks.append((image, slot))
            targets.append(local[annotation])
    columns = np.stack(rows) if rows else np.zeros((0, 0))
    return columns, targets, picks


__all__ = [
    "CAPTION_SEPARATOR",
    "MultiLabelResult",
    "concat_captions",
    "contrastive_loss",
    "multilabel_contrastive_loss",
]

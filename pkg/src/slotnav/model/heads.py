"""Heads on top of the final slots: box regression and the aggregated embedding."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ..autodiff import Array, Tensor, ops, scope
from ..autodiff.tensor import reshape
from ..domain.errors import ContractError
from .image import PatchFeatures
from .layers import Params, dense
from .slots import SlotState


@dataclass(frozen=True, slots=True)
class BoxSet:
    """Class-agnostic boxes, one per slot.

    Attributes:
        boxes: ``(K, 4)`` or ``(B, K, 4)`` normalised corners ``x1, y1, x2, y2``.
    """

    boxes: Tensor

    def numpy(self) -> Array:
        return self.boxes.numpy()


def boxes_from_unit(unit: Tensor) -> Tensor:
    """Turn sigmoid outputs ``(cx, cy, w, h)`` into corners clipped to ``[0, 1]``.

    Example:
        >>> boxes_from_unit(Tensor([[0.5, 0.5, 1.0, 1.0]])).data.tolist()
        [[0.0, 0.0, 1.0, 1.0]]
    """
    cx, cy, width, height = (ops.take(unit, [index], axis=-1) for index in range(4))
    half_w, half_h = width * 0.5, height * 0.5
    corners = [cx - half_w, cy - half_h, cx + half_w, cy + half_h]
    return ops.concat([ops.clip(corner, 0.0, 1.0) for corner in corners], axis=-1)


def predict_boxes(state: SlotState, params: Params) -> BoxSet:
    """Three-layer MLP per slot, sigmoid, centre-size to clipped corners."""
    with scope("box"):
        hidden = ops.gelu(dense(state.slots, params["box.w1"], params["box.b1"]))
        hidden = ops.gelu(dense(hidden, params["box.w2"], params["box.b2"]))
        unit = ops.sigmoid(dense(hidden, params["box.w3"], params["box.b3"]))
        return BoxSet(boxes=boxes_from_unit(unit))


def aggregate_embedding(feats: PatchFeatures, state: SlotState, params: Params) -> Tensor:
    """``l2_normalize(MLP(concat(pooled, linear(flatten(S)))))``, shape ``(D,)`` or ``(B, D)``."""
    slots = state.slots
    if slots.shape[:-2] != feats.pooled.shape[:-1]:
        raise ContractError(f"aggregate_embedding: slots {slots.shape} do not match pooled {feats.pooled.shape}")
    with scope("agg"):
        flat = reshape(slots, (*slots.shape[:-2], slots.shape[-2] * slots.shape[-1]))
        summary = dense(flat, params["agg.slot.weight"], params["agg.slot.bias"])
        combined = ops.concat([feats.pooled, summary], axis=-1)
        hidden = ops.gelu(dense(combined, params["agg.w1"], params["agg.b1"]))
        return ops.l2_normalize(dense(hidden, params["agg.w2"], params["agg.b2"]), axis=-1)


def project_slots(slots: Tensor, params: Params, picks: Sequence[tuple[int, int]]) -> Tensor:
    """Project selected slots to ``D`` with their own block of the aggregation linear map.

    Slot ``i`` of image ``b`` is multiplied by rows ``i * D_s : (i + 1) * D_s`` of
    ``agg.slot.weight`` and shifted by ``agg.slot.bias``, i.e. the contribution
    that slot makes to ``linear(flatten(S))``.

    Args:
        slots: ``(B, K, D_s)`` final slots.
        params: encoder parameters.
        picks: ``(image index, slot index)`` pairs.

    Returns:
        ``(len(picks), D)`` projected slots (not normalised).
    """
    batch, count, slot_dim = slots.shape
    weight = params["agg.slot.weight"]
    dim = weight.shape[-1]
    if weight.shape[0] != count * slot_dim:
        raise ContractError(f"project_slots: weight {weight.shape} does not fit {count} slots of width {slot_dim}")
    rows = np.array([image * count + slot for image, slot in picks], dtype=np.int64)
    slot_ids = np.array([slot for _, slot in picks], dtype=np.int64)
    if rows.size == 0 or rows.min() < 0 or rows.max() >= batch * count:
        raise ContractError(f"project_slots: picks {list(picks)} out of range for {slots.shape}")
    with scope("agg.project"):
        chosen = reshape(ops.take(reshape(slots, (batch * count, slot_dim)), rows, axis=0), (rows.size, 1, slot_dim))
        blocks = ops.take(reshape(weight, (count, slot_dim, dim)), slot_ids, axis=0)
        return reshape(chosen @ blocks, (rows.size, dim)) + params["agg.slot.bias"]


__all__ = ["BoxSet", "aggregate_embedding", "boxes_from_unit", "predict_boxes", "project_slots"]

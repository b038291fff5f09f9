"""Box geometry: IoU, GIoU and L1 on normalised corner boxes ``(x1, y1, x2, y2)``.

The float functions are the reference arithmetic used for matching costs;
the ``*_tensor`` forms are the differentiable losses over matched pairs.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from numpy.typing import ArrayLike

from ..autodiff import Array, Tensor, ops
from ..domain.errors import ContractError

Box = Sequence[float]

#: Floor that keeps union and hull strictly positive in the differentiable GIoU.
AREA_FLOOR = 1e-12


def validate_boxes(boxes: ArrayLike, *, unit: bool = True) -> Array:
    """Return ``boxes`` as an ``(N, 4)`` array after checking corner order (and range).

    Example:
        >>> validate_boxes([[0.1, 0.2, 0.5, 0.6]]).shape
        (1, 4)
        >>> validate_boxes([[0.5, 0.2, 0.1, 0.6]])  # doctest: +IGNORE_EXCEPTION_DETAIL
        Traceback (most recent call last):
        ...
        slotnav.domain.errors.ContractError: box 0 has x1 > x2 or y1 > y2
    """
    array = np.asarray(boxes, dtype=np.float64)
    if array.ndim == 1:
        array = array[None]
    if array.ndim != 2 or array.shape[1] != 4:  # noqa: PLR2004
        raise ContractError(f"boxes must have shape (N, 4), got {array.shape}")
    if not np.all(np.isfinite(array)):
        raise ContractError("boxes must be finite")
    for index, (x1, y1, x2, y2) in enumerate(array):
        if x1 > x2 or y1 > y2:
            raise ContractError(f"box {index} has x1 > x2 or y1 > y2")
    if unit and (array.min(initial=0.0) < 0.0 or array.max(initial=0.0) > 1.0):
        raise ContractError("normalised boxes must lie in [0, 1]")
    return array


def _areas(a: Box, b: Box) -> tuple[float, float, float]:
    ax1, ay1, ax2, ay2 = (float(v) for v in a)
    bx1, by1, bx2, by2 = (float(v) for v in b)
    inter = max(0.0, min(ax2, bx2) - max(ax1, bx1)) * max(0.0, min(ay2, by2) - max(ay1, by1))
    union = (ax2 - ax1) * (ay2 - ay1) + (bx2 - bx1) * (by2 - by1) - inter
    hull = (max(ax2, bx2) - min(ax1, bx1)) * (max(ay2, by2) - min(ay1, by1))
    return inter, union, hull


def iou(a: Box, b: Box) -> float:
    """Intersection over union; an empty union scores ``1`` for identical boxes, else ``0``.

    Example:
        >>> iou((0, 0, 2, 2), (1, 1, 3, 3))
        0.14285714285714285
    """
    inter, union, _ = _areas(a, b)
    if union <= 0:
        return 1.0 if tuple(map(float, a)) == tuple(map(float, b)) else 0.0
    return inter / union


def giou(a: Box, b: Box) -> float:
    """Generalised IoU ``IoU - (hull - union) / hull``.

    Boxes with area score in ``(-1, 1]``. Degenerate boxes are allowed. With
    an empty union the IoU term is ``0``, so two distinct degenerate boxes
    with a non-empty hull reach the lower limit ``-1``; identical degenerate
    boxes score ``1`` and an empty hull otherwise scores ``0``.

    Example:
        >>> giou((0, 0, 2, 2), (0, 0, 2, 2))
        1.0
        >>> round(giou((0, 0, 2, 2), (1, 1, 3, 3)), 5)
        -0.07937
        >>> round(giou((0, 0, 1, 1), (2, 2, 3, 3)), 5)
        -0.77778
    """
    inter, union, hull = _areas(a, b)
    if union <= 0 and tuple(map(float, a)) == tuple(map(float, b)):
        return 1.0
    if hull <= 0:
        return 0.0
    overlap = inter / union if union > 0 else 0.0
    return overlap - (hull - union) / hull


def l1_box(a: Box, b: Box) -> float:
    """Sum of absolute corner differences.

    Example:
        >>> l1_box((0, 0, 2, 2), (1, 1, 3, 3))
        4.0
    """
    return float(sum(abs(float(x) - float(y)) for x, y in zip(a, b, strict=True)))


def _column(boxes: Tensor, index: int) -> Tensor:
    return ops.take(boxes, [index], axis=-1)


def giou_tensor(pred: Tensor, target: Tensor) -> Tensor:
    """Row-wise differentiable GIoU of two ``(M, 4)`` box tensors, shape ``(M, 1)``."""
    px1, py1, px2, py2 = (_column(pred, i) for i in range(4))
    tx1, ty1, tx2, ty2 = (_column(target, i) for i in range(4))
    inter_w = ops.maximum(ops.minimum(px2, tx2) - ops.maximum(px1, tx1), 0.0)
    inter_h = ops.maximum(ops.minimum(py2, ty2) - ops.maximum(py1, ty1), 0.0)
    inter = inter_w * inter_h
    union = (px2 - px1) * (py2 - py1) + (tx2 - tx1) * (ty2 - ty1) - inter
    hull = (ops.maximum(px2, tx2) - ops.minimum(px1, tx1)) * (ops.maximum(py2, ty2) - ops.minimum(py1, ty1))
    union = ops.maximum(union, AREA_FLOOR)
    hull = ops.maximum(hull, AREA_FLOOR)
    return inter / union - (hull - union) / hull


def l1_tensor(pred: Tensor, target: Tensor) -> Tensor:
    """Row-wise ``sum |pred - target|`` of two ``(M, 4)`` box tensors, shape ``(M,)``."""
    return (pred - target).abs().sum(axis=-1)


__all__ = [
    "AREA_FLOOR",
    "Box",
    "giou",
    "giou_tensor",
    "iou",
    "l1_box",
    "l1_tensor",
    "validate_boxes",
]

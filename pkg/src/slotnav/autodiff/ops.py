"""Differentiable operations beyond plain arithmetic.

Every function here takes and returns :class:`~slotnav.autodiff.tensor.Tensor`
objects, validates shapes up front and names the failing node in its errors.
Piecewise operations record their branch decision on the active trace so
:func:`~slotnav.autodiff.gradcheck.finite_difference_check` can skip
coordinates that straddle a kink. At a tie the first branch wins: ``minimum``
and ``maximum`` pick their first argument, ``abs`` treats zero as positive.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..domain.errors import ContractError, ShapeError
from .tensor import Array, Tensor, as_tensor, broadcast_shape, qualified, record_branch, unbroadcast

_GELU_SCALE = math.sqrt(2.0 / math.pi)
_GELU_CUBIC = 0.044715


def exp(value: Tensor) -> Tensor:
    with np.errstate(all="ignore"):
        data = np.exp(value.data)
    return Tensor.from_op(qualified("exp"), data, (value,), lambda g: (g * data,))


def log(value: Tensor) -> Tensor:
    with np.errstate(all="ignore"):
        data = np.log(value.data)
    return Tensor.from_op(qualified("log"), data, (value,), lambda g: (g / value.data,))


def sqrt(value: Tensor) -> Tensor:
    with np.errstate(all="ignore"):
        data = np.sqrt(value.data)
        scale = 0.5 / data
    return Tensor.from_op(qualified("sqrt"), data, (value,), lambda g: (g * scale,))


def tanh(value: Tensor) -> Tensor:
    data = np.tanh(value.data)
    return Tensor.from_op(qualified("tanh"), data, (value,), lambda g: (g * (1.0 - data * data),))


def sigmoid(value: Tensor) -> Tensor:
    """Logistic function, computed through ``tanh`` so large inputs cannot overflow.

    Example:
        >>> sigmoid(Tensor([0.0])).data.tolist()
        [0.5]
    """
    data = 0.5 * (1.0 + np.tanh(0.5 * value.data))
    return Tensor.from_op(qualified("sigmoid"), data, (value,), lambda g: (g * data * (1.0 - data),))


def gelu(value: Tensor) -> Tensor:
    """GELU with the tanh approximation used by transformer MLPs."""
    x = value.data
    inner = np.tanh(_GELU_SCALE * (x + _GELU_CUBIC * x**3))
    data = 0.5 * x * (1.0 + inner)
    slope = 0.5 * (1.0 + inner) + 0.5 * x * (1.0 - inner**2) * _GELU_SCALE * (1.0 + 3.0 * _GELU_CUBIC * x**2)
    return Tensor.from_op(qualified("gelu"), data, (value,), lambda g: (g * slope,))


def absolute(value: Tensor) -> Tensor:
    return value.abs()


def _select(op: str, left: Tensor | ArrayLike, right: Tensor | ArrayLike, *, take_smaller: bool) -> Tensor:
    a, b = as_tensor(left), as_tensor(right)
    name = qualified(op)
    shape = broadcast_shape(name, a.shape, b.shape)
    first = np.broadcast_to(a.data <= b.data if take_smaller else a.data >= b.data, shape)
    record_branch(op, first)
    data = np.where(first, a.data, b.data)
    return Tensor.from_op(
        name,
        data,
        (a, b),
        lambda g: (unbroadcast(np.where(first, g, 0.0), a.shape), unbroadcast(np.where(first, 0.0, g), b.shape)),
    )


def minimum(left: Tensor | ArrayLike, right: Tensor | ArrayLike) -> Tensor:
    """Elementwise minimum; ties route the gradient to ``left``.

    Example:
        >>> minimum(Tensor([1.0, 5.0]), Tensor([3.0, 2.0])).data.tolist()
        [1.0, 2.0]
    """
    return _select("minimum", left, right, take_smaller=True)


def maximum(left: Tensor | ArrayLike, right: Tensor | ArrayLike) -> Tensor:
    """Elementwise maximum; ties route the gradient to ``left``."""
    return _select("maximum", left, right, take_smaller=False)


def clip(value: Tensor, low: float, high: float) -> Tensor:
    """Clamp into ``[low, high]``; the gradient is zero where clamping happened."""
    if low > high:
        raise ContractError(f"{qualified('clip')}: low {low} exceeds high {high}")
    x = value.data
    below = x < low
    above = x > high
    record_branch("clip", np.stack([below, above]))
    passes = ~(below | above)
    return Tensor.from_op(qualified("clip"), np.clip(x, low, high), (value,), lambda g: (np.where(passes, g, 0.0),))


def _axis(op: str, value: Tensor, axis: int) -> int:
    if not -value.ndim <= axis < value.ndim:
        raise ShapeError(f"{qualified(op)}: axis {axis} out of range for shape {value.shape}")
    return axis % value.ndim


def softmax(value: Tensor, axis: int = -1) -> Tensor:
    """Softmax along ``axis``.

    Example:
        >>> softmax(Tensor([0.0, 0.0, 0.0])).data.round(12).tolist()
        [0.333333333333, 0.333333333333, 0.333333333333]
    """
    ax = _axis("softmax", value, axis)
    shifted = value.data - value.data.max(axis=ax, keepdims=True)
    weights = np.exp(shifted)
    data = weights / weights.sum(axis=ax, keepdims=True)

    def backward(g: Array) -> tuple[Array]:
        return (data * (g - (g * data).sum(axis=ax, keepdims=True)),)

    return Tensor.from_op(qualified("softmax"), data, (value,), backward)


def log_softmax(value: Tensor, axis: int = -1) -> Tensor:
    ax = _axis("log_softmax", value, axis)
    shifted = value.data - value.data.max(axis=ax, keepdims=True)
    data = shifted - np.log(np.exp(shifted).sum(axis=ax, keepdims=True))
    probs = np.exp(data)

    def backward(g: Array) -> tuple[Array]:
        return (g - probs * g.sum(axis=ax, keepdims=True),)

    return Tensor.from_op(qualified("log_softmax"), data, (value,), backward)


def normalize_sum(value: Tensor, axis: int = -1) -> Tensor:
    """Divide by the sum along ``axis`` so every slice sums to one."""
    ax = _axis("normalize_sum", value, axis)
    total = value.data.sum(axis=ax, keepdims=True)
    with np.errstate(all="ignore"):
        data = value.data / total

    def backward(g: Array) -> tuple[Array]:
        return ((g - (g * data).sum(axis=ax, keepdims=True)) / total,)

    return Tensor.from_op(qualified("normalize_sum"), data, (value,), backward)


def layer_norm(value: Tensor, eps: float = 1e-9) -> Tensor:
    """Standardise the last axis to zero mean and unit variance (no affine part)."""
    x = value.data
    centered = x - x.mean(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt((centered * centered).mean(axis=-1, keepdims=True) + eps)
    data = centered * inv_std

    def backward(g: Array) -> tuple[Array]:
        return (inv_std * (g - g.mean(axis=-1, keepdims=True) - data * (g * data).mean(axis=-1, keepdims=True)),)

    return Tensor.from_op(qualified("layer_norm"), data, (value,), backward)


def l2_normalize(value: Tensor, axis: int = -1) -> Tensor:
    """Scale slices along ``axis`` to unit Euclidean norm; zero slices overflow."""
    ax = _axis("l2_normalize", value, axis)
    norm = np.sqrt((value.data * value.data).sum(axis=ax, keepdims=True))
    with np.errstate(all="ignore"):
        data = value.data / norm

    def backward(g: Array) -> tuple[Array]:
        return ((g - data * (g * data).sum(axis=ax, keepdims=True)) / norm,)

    return Tensor.from_op(qualified("l2_normalize"), data, (value,), backward)


def concat(values: Sequence[Tensor], axis: int = 0) -> Tensor:
    name = qualified("concat")
    if not values:
        raise ShapeError(f"{name}: nothing to concatenate")
    ax = _axis("concat", values[0], axis)
    reference = values[0].shape
    for item in values[1:]:
        if item.ndim != len(reference) or any(
            dim != ref for i, (dim, ref) in enumerate(zip(item.shape, reference, strict=True)) if i != ax
        ):
            raise ShapeError(f"{name}: shapes {reference} and {item.shape} differ off axis {ax}")
    bounds = np.cumsum([item.shape[ax] for item in values])[:-1]
    data = np.concatenate([item.data for item in values], axis=ax)
    return Tensor.from_op(name, data, tuple(values), lambda g: tuple(np.split(g, bounds, axis=ax)))


def stack(values: Sequence[Tensor], axis: int = 0) -> Tensor:
    name = qualified("stack")
    if not values:
        raise ShapeError(f"{name}: nothing to stack")
    shapes = {item.shape for item in values}
    if len(shapes) != 1:
        raise ShapeError(f"{name}: shapes differ {sorted(shapes)}")
    data = np.stack([item.data for item in values], axis=axis)
    ax = axis % data.ndim
    return Tensor.from_op(name, data, tuple(values), lambda g: tuple(np.moveaxis(g, ax, 0)))


def take(value: Tensor, indices: Sequence[int] | NDArray[np.int64], axis: int = 0) -> Tensor:
    """Select entries along ``axis`` (repeats allowed; gradients accumulate)."""
    name = qualified("take")
    ax = _axis("take", value, axis)
    index = np.asarray(indices, dtype=np.int64).reshape(-1)
    if index.size and (index.min() < 0 or index.max() >= value.shape[ax]):
        raise ShapeError(f"{name}: index out of range for axis {ax} of {value.shape}")
    shape = value.shape

    def backward(g: Array) -> tuple[Array]:
        grad = np.zeros(shape)
        np.add.at(np.moveaxis(grad, ax, 0), index, np.moveaxis(g, ax, 0))
        return (grad,)

    return Tensor.from_op(name, np.take(value.data, index, axis=ax), (value,), backward)


def pick(value: Tensor, indices: Sequence[int] | NDArray[np.int64]) -> Tensor:
    """Row-wise gather: ``out[n] = value[n, indices[n]]`` for a 2-axis tensor.

    Example:
        >>> pick(Tensor([[1.0, 2.0], [3.0, 4.0]]), [1, 0]).data.tolist()
        [2.0, 3.0]
    """
    name = qualified("pick")
    index = np.asarray(indices, dtype=np.int64).reshape(-1)
    if value.ndim != 2 or index.size != value.shape[0]:  # noqa: PLR2004
        raise ShapeError(f"{name}: need one index per row of a matrix, got {index.size} for shape {value.shape}")
    if index.size and (index.min() < 0 or index.max() >= value.shape[1]):
        raise ShapeError(f"{name}: column index out of range for shape {value.shape}")
    rows = np.arange(index.size)
    shape = value.shape

    def backward(g: Array) -> tuple[Array]:
        grad = np.zeros(shape)
        np.add.at(grad, (rows, index), g)
        return (grad,)

    return Tensor.from_op(name, value.data[rows, index], (value,), backward)


def cross_entropy(logits: Tensor, targets: Sequence[int] | NDArray[np.int64]) -> Tensor:
    """Mean softmax cross-entropy of ``logits`` (rows) against integer targets."""
    return -pick(log_softmax(logits, axis=-1), targets).mean()


__all__ = [
    "absolute",
    "clip",
    "concat",
    "cross_entropy",
    "exp",
    "gelu",
    "l2_normalize",
    "layer_norm",
    "log",
    "log_softmax",
    "maximum",
    "minimum",
    "normalize_sum",
    "pick",
    "sigmoid",
    "softmax",
    "sqrt",
    "stack",
    "take",
    "tanh",
]

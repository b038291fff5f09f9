"""Define-by-run tensors carrying reverse-mode backward closures.

A :class:`Tensor` wraps a float64 numpy array. Every operation applied to a
tensor that requires gradients returns a new tensor holding its parents and a
closure mapping the upstream gradient onto each parent. The closures are only
run by :func:`slotnav.autodiff.graph.backward`.

Broadcasting is deliberately narrow: operands must have equal shapes, one of
them must be a scalar, or the smaller shape must equal the trailing dimensions
of the larger one (a bias added across a leading batch). Anything else raises
:class:`~slotnav.domain.errors.ShapeError` naming the node.

Example:
    >>> x = Tensor([3.0], requires_grad=True)
    >>> (x * x).data.tolist()
    [9.0]
"""

from __future__ import annotations

from collections.abc import Callable, Iterator, Sequence
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, field
from typing import TypeAlias

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..domain.errors import NonFiniteError, ShapeError

Array: TypeAlias = NDArray[np.float64]
Backward: TypeAlias = Callable[[Array], Sequence[Array | None]]
Axis: TypeAlias = int | tuple[int, ...] | None

_MATRIX_AXES = 2


@dataclass(slots=True)
class Trace:
    """Discrete decisions taken while a computation ran.

    Piecewise operations (``abs``, ``minimum``, ``maximum``, ``clip``) and
    combinatorial steps such as box matching append one note each. Two runs
    with equal signatures followed the same smooth branch everywhere.
    """

    branches: list[tuple[str, bytes]] = field(default_factory=list)

    def signature(self) -> tuple[tuple[str, bytes], ...]:
        return tuple(self.branches)


_TRACE: ContextVar[Trace | None] = ContextVar("slotnav_trace", default=None)
_SCOPE: ContextVar[tuple[str, ...]] = ContextVar("slotnav_scope", default=())


@contextmanager
def tracing() -> Iterator[Trace]:
    """Collect branch notes for everything evaluated inside the block.

    Example:
        >>> with tracing() as trace:
        ...     _ = Tensor([-1.0, 2.0]).abs()
        >>> [op for op, _ in trace.branches]
        ['abs']
    """
    trace = Trace()
    token = _TRACE.set(trace)
    try:
        yield trace
    finally:
        _TRACE.reset(token)


@contextmanager
def scope(name: str) -> Iterator[None]:
    """Prefix node names created inside the block with ``name/``."""
    token = _SCOPE.set((*_SCOPE.get(), name))
    try:
        yield
    finally:
        _SCOPE.reset(token)


def qualified(op: str) -> str:
    """Return ``op`` prefixed with the active scope path."""
    return "/".join((*_SCOPE.get(), op))


def record_branch(op: str, decision: ArrayLike) -> None:
    """Append a discrete decision to the active trace, if any."""
    trace = _TRACE.get()
    if trace is not None:
        trace.branches.append((qualified(op), np.ascontiguousarray(decision).tobytes()))


class Tensor:
    """Dense float64 tensor with an optional backward closure.

    Attributes:
        data: the values; never mutated after construction.
        requires_grad: whether gradients flow into this tensor.
        name: label used for parameters and in error messages.
        op: qualified name of the node that produced the tensor.
        parents: input tensors that require gradients.
    """

    __slots__ = ("_backward", "data", "name", "op", "parents", "requires_grad")
    __array_priority__ = 1000

    def __init__(self, data: ArrayLike, *, requires_grad: bool = False, name: str | None = None) -> None:
        array = np.array(data, dtype=np.float64)
        label = name or "constant"
        if not np.all(np.isfinite(array)):
            raise NonFiniteError(f"tensor '{label}' holds a non-finite value")
        array.setflags(write=False)
        self.data: Array = array
        self.requires_grad = requires_grad
        self.name = name
        self.op = label
        self.parents: tuple[Tensor, ...] = ()
        self._backward: Backward | None = None

    @classmethod
    def from_op(cls, op: str, data: Array, parents: tuple[Tensor, ...], backward: Backward) -> Tensor:
        if not np.all(np.isfinite(data)):
            raise NonFiniteError(f"node '{op}' produced a non-finite value", node=op)
        node = cls.__new__(cls)
        data.setflags(write=False)
        node.data = data
        node.name = None
        node.op = op
        node.requires_grad = any(parent.requires_grad for parent in parents)
        node.parents = parents if node.requires_grad else ()
        node._backward = backward if node.requires_grad else None
        return node

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(int(dim) for dim in self.data.shape)

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return int(self.data.size)

    def item(self) -> float:
        """Return the single value of a one-element tensor."""
        if self.size != 1:
            raise ShapeError(f"{self.op}: item() needs one element, shape is {self.shape}")
        return float(self.data.reshape(()))

    def numpy(self) -> Array:
        """Return a writable copy of the values."""
        return self.data.copy()

    def backward_fn(self) -> Backward | None:
        return self._backward

    def __repr__(self) -> str:
        return f"Tensor(op={self.op!r}, shape={self.shape}, requires_grad={self.requires_grad})"

    def __add__(self, other: Tensor | ArrayLike) -> Tensor:
        return add(self, other)

    def __radd__(self, other: ArrayLike) -> Tensor:
        return add(other, self)

    def __sub__(self, other: Tensor | ArrayLike) -> Tensor:
        return sub(self, other)

    def __rsub__(self, other: ArrayLike) -> Tensor:
        return sub(other, self)

    def __mul__(self, other: Tensor | ArrayLike) -> Tensor:
        return mul(self, other)

    def __rmul__(self, other: ArrayLike) -> Tensor:
        return mul(other, self)

    def __truediv__(self, other: Tensor | ArrayLike) -> Tensor:
        return div(self, other)

    def __rtruediv__(self, other: ArrayLike) -> Tensor:
        return div(other, self)

    def __neg__(self) -> Tensor:
        return neg(self)

    def __matmul__(self, other: Tensor) -> Tensor:
        return matmul(self, other)

    def sum(self, axis: Axis = None, *, keepdims: bool = False) -> Tensor:
        return reduce_sum(self, axis, keepdims=keepdims)

    def mean(self, axis: Axis = None, *, keepdims: bool = False) -> Tensor:
        return reduce_mean(self, axis, keepdims=keepdims)

    def reshape(self, *shape: int) -> Tensor:
        return reshape(self, shape)

    def transpose(self, *axes: int) -> Tensor:
        return transpose(self, axes or None)

    def abs(self) -> Tensor:
        data = self.data
        positive = data >= 0
        record_branch("abs", positive)
        sign = np.where(positive, 1.0, -1.0)
        return Tensor.from_op(qualified("abs"), np.abs(data), (self,), lambda g: (g * sign,))


def as_tensor(value: Tensor | ArrayLike) -> Tensor:
    """Return ``value`` unchanged when it is a tensor, else wrap it as a constant."""
    return value if isinstance(value, Tensor) else Tensor(value)


def broadcast_shape(op: str, left: tuple[int, ...], right: tuple[int, ...]) -> tuple[int, ...]:
    """Result shape of an elementwise op, or a :class:`ShapeError`.

    Example:
        >>> broadcast_shape("add", (2, 3), (3,))
        (2, 3)
        >>> broadcast_shape("add", (2, 3), (2,))
        Traceback (most recent call last):
        ...
        slotnav.domain.errors.ShapeError: add: shapes (2, 3) and (2,) are incompatible
    """
    if left == right or not right:
        return left
    if not left:
        return right
    if len(left) > len(right) and left[len(left) - len(right) :] == right:
        return left
    if len(right) > len(left) and right[len(right) - len(left) :] == left:
        return right
    raise ShapeError(f"{op}: shapes {left} and {right} are incompatible")


def unbroadcast(grad: Array, shape: tuple[int, ...]) -> Array:
    """Sum ``grad`` over the leading axes that broadcasting added."""
    if grad.shape == shape:
        return grad
    if not shape:
        return np.asarray(grad.sum())
    return grad.sum(axis=tuple(range(grad.ndim - len(shape))))


def _binary(op: str, left: Tensor | ArrayLike, right: Tensor | ArrayLike) -> tuple[str, Tensor, Tensor]:
    a, b = as_tensor(left), as_tensor(right)
    name = qualified(op)
    broadcast_shape(name, a.shape, b.shape)
    return name, a, b


def add(left: Tensor | ArrayLike, right: Tensor | ArrayLike) -> Tensor:
    name, a, b = _binary("add", left, right)
    return Tensor.from_op(
        name, a.data + b.data, (a, b), lambda g: (unbroadcast(g, a.shape), unbroadcast(g, b.shape))
    )


def sub(left: Tensor | ArrayLike, right: Tensor | ArrayLike) -> Tensor:
    name, a, b = _binary("sub", left, right)
    return Tensor.from_op(
        name, a.data - b.data, (a, b), lambda g: (unbroadcast(g, a.shape), unbroadcast(-g, b.shape))
    )


def mul(left: Tensor | ArrayLike, right: Tensor | ArrayLike) -> Tensor:
    name, a, b = _binary("mul", left, right)
    return Tensor.from_op(
        name,
        a.data * b.data,
        (a, b),
        lambda g: (unbroadcast(g * b.data, a.shape), unbroadcast(g * a.data, b.shape)),
    )


def div(left: Tensor | ArrayLike, right: Tensor | ArrayLike) -> Tensor:
    name, a, b = _binary("div", left, right)
    with np.errstate(all="ignore"):
        data = a.data / b.data
    return Tensor.from_op(
        name,
        data,
        (a, b),
        lambda g: (unbroadcast(g / b.data, a.shape), unbroadcast(-g * a.data / (b.data * b.data), b.shape)),
    )


def neg(value: Tensor) -> Tensor:
    return Tensor.from_op(qualified("neg"), -value.data, (value,), lambda g: (-g,))


def matmul(left: Tensor, right: Tensor) -> Tensor:
    """Matrix product over the last two axes.

    ``left`` may carry leading batch axes; ``right`` is either a plain matrix
    shared by the whole batch or has exactly the batch axes of ``left``.

    Example:
        >>> matmul(Tensor(np.ones((2, 3))), Tensor(np.ones((3, 4)))).shape
        (2, 4)
    """
    name = qualified("matmul")
    a, b = left, right
    if a.ndim < _MATRIX_AXES or b.ndim < _MATRIX_AXES:
        raise ShapeError(f"{name}: operands need at least 2 axes, got {a.shape} and {b.shape}")
    if a.shape[-1] != b.shape[-2]:
        raise ShapeError(f"{name}: inner dimensions differ, {a.shape} @ {b.shape}")
    shared = b.ndim == _MATRIX_AXES
    if not shared and b.shape[:-2] != a.shape[:-2]:
        raise ShapeError(f"{name}: batch axes differ, {a.shape} @ {b.shape}")

    def backward(g: Array) -> tuple[Array, Array]:
        grad_a = g @ np.swapaxes(b.data, -1, -2)
        grad_b = np.swapaxes(a.data, -1, -2) @ g
        if shared and grad_b.ndim > _MATRIX_AXES:
            grad_b = grad_b.sum(axis=tuple(range(grad_b.ndim - _MATRIX_AXES)))
        return grad_a, grad_b

    return Tensor.from_op(name, a.data @ b.data, (a, b), backward)


def _normalize_axes(axis: Axis, ndim: int) -> tuple[int, ...]:
    if axis is None:
        return tuple(range(ndim))
    axes = (axis,) if isinstance(axis, int) else axis
    return tuple(sorted(ax % ndim for ax in axes))


def reduce_sum(value: Tensor, axis: Axis = None, *, keepdims: bool = False) -> Tensor:
    axes = _normalize_axes(axis, value.ndim)
    shape = value.shape

    def backward(g: Array) -> tuple[Array]:
        expanded = g if keepdims else np.expand_dims(g, axes)
        return (np.broadcast_to(expanded, shape).copy(),)

    data = np.asarray(value.data.sum(axis=axes, keepdims=keepdims))
    return Tensor.from_op(qualified("sum"), data, (value,), backward)


def reduce_mean(value: Tensor, axis: Axis = None, *, keepdims: bool = False) -> Tensor:
    axes = _normalize_axes(axis, value.ndim)
    count = int(np.prod([value.shape[ax] for ax in axes])) if axes else 1
    if count == 0:
        raise ShapeError(f"{qualified('mean')}: reduction over an empty axis")
    return reduce_sum(value, axes, keepdims=keepdims) * (1.0 / count)


def reshape(value: Tensor, shape: Sequence[int]) -> Tensor:
    name = qualified("reshape")
    try:
        data = value.data.reshape(tuple(shape))
    except ValueError as exc:
        raise ShapeError(f"{name}: cannot reshape {value.shape} into {tuple(shape)}") from exc
    original = value.shape
    return Tensor.from_op(name, data, (value,), lambda g: (g.reshape(original),))


def transpose(value: Tensor, axes: Sequence[int] | None = None) -> Tensor:
    order = tuple(axes) if axes is not None else tuple(reversed(range(value.ndim)))
    if sorted(ax % max(value.ndim, 1) for ax in order) != list(range(value.ndim)):
        raise ShapeError(f"{qualified('transpose')}: {order} is not a permutation of {value.ndim} axes")
    inverse = tuple(int(i) for i in np.argsort(order))
    return Tensor.from_op(
        qualified("transpose"), value.data.transpose(order), (value,), lambda g: (g.transpose(inverse),)
    )


__all__ = [
    "Array",
    "Tensor",
    "Trace",
    "add",
    "as_tensor",
    "broadcast_shape",
    "div",
    "matmul",
    "mul",
    "neg",
    "qualified",
    "record_branch",
    "reduce_mean",
    "reduce_sum",
    "reshape",
    "scope",
    "sub",
    "tracing",
    "transpose",
    "unbroadcast",
]

"""Graphs of named parameters, forward evaluation and reverse-mode gradients.

A :class:`Graph` pairs a build function with its trainable parameters. The
build function receives the parameters as gradient-tracking tensors plus the
bound inputs and returns named output tensors; the node list and its
topological order materialise on every evaluation.

Example:
    >>> import numpy as np
    >>> square = Graph(lambda p, _: {"y": (p["x"] * p["x"]).sum()}, {"x": np.array([3.0])})
    >>> report = gradient(square, "y")
    >>> report.loss, report.gradients["x"].tolist()
    (9.0, [6.0])
"""

from __future__ import annotations

from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..domain.errors import ContractError, NonFiniteError
from .tensor import Array, Tensor, tracing

#: Build function: (parameters, inputs) -> named outputs.
BuildFn = Callable[[Mapping[str, Tensor], Mapping[str, Any]], Mapping[str, Tensor]]


@dataclass(frozen=True, slots=True)
class Graph:
    """A differentiable computation over named parameters.

    Attributes:
        build: function evaluating the computation.
        parameters: trainable values by name.
        inputs: names of inputs that must be bound at evaluation time.
    """

    build: BuildFn
    parameters: Mapping[str, Array]
    inputs: tuple[str, ...] = ()

    def with_parameters(self, parameters: Mapping[str, Array]) -> Graph:
        return Graph(self.build, parameters, self.inputs)


@dataclass(frozen=True, slots=True)
class GradientReport:
    """Gradients of a scalar output with respect to every parameter."""

    gradients: dict[str, Array]
    loss: float
    outputs: dict[str, Tensor] = field(default_factory=lambda: {})


def _check_inputs(graph: Graph, inputs: Mapping[str, Any]) -> None:
    missing = [name for name in graph.inputs if name not in inputs]
    if missing:
        raise ContractError(f"unbound graph inputs: {', '.join(missing)}")


def parameter_tensors(parameters: Mapping[str, Array]) -> dict[str, Tensor]:
    """Wrap parameter arrays as gradient-tracking leaves named after their key."""
    return {name: Tensor(value, requires_grad=True, name=name) for name, value in parameters.items()}


def evaluate(graph: Graph, inputs: Mapping[str, Any] | None = None) -> dict[str, Tensor]:
    """Run the forward pass and return every named output.

    Raises:
        ContractError: an input named by the graph is unbound.
        ShapeError: an operation received inconsistent shapes.
        NonFiniteError: an intermediate value overflowed.
    """
    bound = dict(inputs or {})
    _check_inputs(graph, bound)
    return dict(graph.build(parameter_tensors(graph.parameters), bound))


def topological_order(output: Tensor) -> list[Tensor]:
    """Nodes reachable from ``output``, inputs before consumers.

    Iterative depth-first search, so deep graphs cannot exhaust the
    interpreter's recursion limit.
    """
    order: list[Tensor] = []
    seen: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(output, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        stack.extend((parent, False) for parent in reversed(node.parents) if id(parent) not in seen)
    return order


def backward(output: Tensor) -> dict[int, Array]:
    """Propagate ``d output / d node`` through the graph, keyed by node id."""
    grads: dict[int, Array] = {id(output): np.ones(output.shape)}
    for node in reversed(topological_order(output)):
        upstream = grads.get(id(node))
        closure = node.backward_fn()
        if upstream is None or closure is None:
            continue
        for parent, grad in zip(node.parents, closure(upstream), strict=True):
            if grad is None or not parent.requires_grad:
                continue
            key = id(parent)
            grads[key] = grads[key] + grad if key in grads else np.asarray(grad, dtype=np.float64)
    return grads


def gradient(graph: Graph, output: str, inputs: Mapping[str, Any] | None = None) -> GradientReport:
    """Reverse-mode gradient of the scalar output ``output`` for every parameter.

    Parameters the output does not depend on get a zero gradient.

    Raises:
        ContractError: ``output`` is missing or not a scalar.
    """
    bound = dict(inputs or {})
    _check_inputs(graph, bound)
    leaves = parameter_tensors(graph.parameters)
    with tracing():
        outputs = dict(graph.build(leaves, bound))
    if output not in outputs:
        raise ContractError(f"graph has no output named {output!r}")
    node = outputs[output]
    if node.shape != ():
        raise ContractError(f"gradient needs a scalar output, {output!r} has shape {node.shape}")
    loss = node.item()
    if not np.isfinite(loss):  # pragma: no cover - nodes are checked on creation
        raise NonFiniteError(f"output {output!r} is not finite")
    grads = backward(node)
    gradients = {
        name: grads.get(id(leaf), np.zeros(leaf.shape)).reshape(leaf.shape) for name, leaf in leaves.items()
    }
    return GradientReport(gradients=gradients, loss=loss, outputs=outputs)


__all__ = [
    "BuildFn",
    "GradientReport",
    "Graph",
    "backward",
    "evaluate",
    "gradient",
    "parameter_tensors",
    "topological_order",
]

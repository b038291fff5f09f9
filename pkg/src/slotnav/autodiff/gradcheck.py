"""Central finite-difference verification of analytic gradients."""

from __future__ import annotations

import logging
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Any

import numpy as np

from ..domain.errors import ContractError
from .graph import Graph, gradient
from .tensor import Array, Tensor, Trace, tracing

logger = logging.getLogger(__name__)

#: Below this magnitude on both sides the absolute error is reported instead.
ABSOLUTE_FLOOR = 1e-8


@dataclass(frozen=True, slots=True)
class ParameterCheck:
    """Result for one parameter.

    Attributes:
        max_error: worst relative (or absolute, see :data:`ABSOLUTE_FLOOR`) error.
        checked: number of coordinates compared.
        excluded: coordinates skipped because a kink lies within one step.
    """

    max_error: float
    checked: int
    excluded: int


@dataclass(frozen=True, slots=True)
class FiniteDifferenceReport:
    """Worst gradient error per parameter."""

    parameters: dict[str, ParameterCheck]
    step: float
    tolerance: float

    @property
    def max_error(self) -> float:
        return max((check.max_error for check in self.parameters.values()), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_error <= self.tolerance

    def failures(self) -> dict[str, float]:
        return {name: check.max_error for name, check in self.parameters.items() if check.max_error > self.tolerance}


def gradient_error(analytic: float, numeric: float) -> float:
    """Relative error ``|a - n| / max(|a|, |n|)``, absolute when both are tiny.

    Example:
        >>> gradient_error(2.0, 2.0)
        0.0
        >>> gradient_error(0.0, 4e-9)
        4e-09
    """
    scale = max(abs(analytic), abs(numeric))
    diff = abs(analytic - numeric)
    return diff if scale < ABSOLUTE_FLOOR else diff / scale


def _scalar(
    graph: Graph, output: str, inputs: Mapping[str, Any], parameters: Mapping[str, Array]
) -> tuple[float, Trace]:
    leaves = {name: Tensor(array, name=name) for name, array in parameters.items()}
    with tracing() as trace:
        value = graph.build(leaves, inputs)[output].item()
    return value, trace


def finite_difference_check(
    graph: Graph,
    output: str,
    *,
    step: float = 1e-5,
    tolerance: float = 1e-4,
    inputs: Mapping[str, Any] | None = None,
    coordinates_per_parameter: int | None = None,
    seed: int = 0,
) -> FiniteDifferenceReport:
    """Compare reverse-mode gradients with ``(f(θ+h) - f(θ-h)) / 2h``.

    A coordinate is excluded when the branch signature (kinks taken, box
    matching chosen) at ``θ ± h`` differs from the one at ``θ``: the function
    is not differentiable within one step there.

    Args:
        graph: computation to check.
        output: name of the scalar output.
        step: perturbation ``h``.
        tolerance: error bound used by :attr:`FiniteDifferenceReport.passed`.
        inputs: bound graph inputs.
        coordinates_per_parameter: when set, check this many coordinates per
            parameter, drawn without replacement with ``seed``.
        seed: sampling seed.

    Example:
        >>> import numpy as np
        >>> g = Graph(lambda p, _: {"f": (p["x"] * p["x"]).sum()}, {"x": np.array([0.5, -2.0])})
        >>> finite_difference_check(g, "f").max_error < 1e-6
        True
    """
    if step <= 0:
        raise ContractError(f"step must be positive, got {step}")
    bound = dict(inputs or {})
    report = gradient(graph, output, bound)
    base = {name: np.array(value, dtype=np.float64) for name, value in graph.parameters.items()}
    _, reference = _scalar(graph, output, bound, base)
    signature = reference.signature()
    rng = np.random.default_rng(seed)

    results: dict[str, ParameterCheck] = {}
    for name, value in base.items():
        flat_count = value.size
        coordinates = np.arange(flat_count)
        if coordinates_per_parameter is not None and coordinates_per_parameter < flat_count:
            coordinates = np.sort(rng.choice(flat_count, size=coordinates_per_parameter, replace=False))
        worst = 0.0
        checked = excluded = 0
        analytic = report.gradients[name].reshape(-1)
        for index in coordinates:
            plus = dict(base)
            minus = dict(base)
            plus[name] = value.copy()
            minus[name] = value.copy()
            plus[name].reshape(-1)[index] += step
            minus[name].reshape(-1)[index] -= step
            f_plus, trace_plus = _scalar(graph, output, bound, plus)
            f_minus, trace_minus = _scalar(graph, output, bound, minus)
            if trace_plus.signature() != signature or trace_minus.signature() != signature:
                excluded += 1
                continue
            numeric = (f_plus - f_minus) / (2.0 * step)
            worst = max(worst, gradient_error(float(analytic[index]), numeric))
            checked += 1
        results[name] = ParameterCheck(max_error=worst, checked=checked, excluded=excluded)
        logger.debug(
            "gradient check",
            extra={"parameter": name, "max_error": worst, "checked": checked, "excluded": excluded},
        )
    return FiniteDifferenceReport(parameters=results, step=step, tolerance=tolerance)


__all__ = [
    "ABSOLUTE_FLOOR",
    "FiniteDifferenceReport",
    "ParameterCheck",
    "finite_difference_check",
    "gradient_error",
]

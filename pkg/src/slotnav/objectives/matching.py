"""Rectangular minimum-cost matching between predicted boxes and annotations.

:func:`hungarian` returns a maximum-cardinality assignment (``min(K, N)``
pairs) of minimum total cost. Among optimal assignments it returns the one
whose slot-sorted pair list is lexicographically smallest, so equal inputs
always give equal outputs.
"""

from __future__ import annotations

import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from itertools import combinations, permutations

import numpy as np
from numpy.typing import ArrayLike
from scipy.optimize import linear_sum_assignment

from ..autodiff import Array
from ..domain.enums import MatchCost
from ..domain.errors import ContractError
from .boxes import giou, l1_box, validate_boxes

#: Relative slack when deciding that two totals are equally optimal.
TIE_TOLERANCE = 1e-9


@dataclass(frozen=True, slots=True)
class Assignment:
    """A matching of slots (rows) to annotations (columns).

    Attributes:
        pairs: ``(slot, annotation)`` pairs sorted by slot.
        unmatched: slots without an annotation, ascending.
        cost: total cost of ``pairs`` (``math.fsum``).
    """

    pairs: tuple[tuple[int, int], ...]
    unmatched: tuple[int, ...]
    cost: float

    def as_array(self) -> Array:
        return np.array(self.pairs, dtype=np.float64).reshape(-1, 2)


def pairwise_cost(pred: ArrayLike, gt: ArrayLike, mode: MatchCost = MatchCost.ONE_MINUS_GIOU) -> Array:
    """``K x N`` matching costs between predicted and annotated boxes.

    ``one_minus_giou`` gives ``l1 + (1 - giou)``; ``literal`` gives ``l1 + giou``.

    Example:
        >>> round(float(pairwise_cost([[0, 0, 2, 2]], [[1, 1, 3, 3]])[0, 0]), 5)
        5.07937
    """
    predicted = validate_boxes(pred, unit=False)
    annotated = validate_boxes(gt, unit=False)
    if not len(predicted) or not len(annotated):
        raise ContractError("pairwise_cost needs at least one predicted and one annotated box")
    sign = -1.0 if mode is MatchCost.ONE_MINUS_GIOU else 1.0
    offset = 1.0 if mode is MatchCost.ONE_MINUS_GIOU else 0.0
    cost = np.empty((len(predicted), len(annotated)))
    for i, box in enumerate(predicted):
        for j, target in enumerate(annotated):
            cost[i, j] = l1_box(box, target) + offset + sign * giou(box, target)
    return cost


def _as_cost(cost: ArrayLike) -> Array:
    matrix = np.asarray(cost, dtype=np.float64)
    if matrix.ndim != 2:  # noqa: PLR2004
        raise ContractError(f"cost matrix must be 2-D, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise ContractError("cost matrix must be finite")
    return matrix


def _total(matrix: Array, pairs: Sequence[tuple[int, int]]) -> float:
    return math.fsum(float(matrix[i, j]) for i, j in pairs)


def _optimum(matrix: Array, rows: Sequence[int], cols: Sequence[int]) -> float:
    if not rows or not cols:
        return 0.0
    sub = matrix[np.ix_(rows, cols)]
    row_ind, col_ind = linear_sum_assignment(sub)
    return math.fsum(float(sub[r, c]) for r, c in zip(row_ind, col_ind, strict=True))


def _build(matrix: Array, pairs: list[tuple[int, int]]) -> Assignment:
    matched = {i for i, _ in pairs}
    unmatched = tuple(i for i in range(matrix.shape[0]) if i not in matched)
    ordered = tuple(sorted(pairs))
    return Assignment(pairs=ordered, unmatched=unmatched, cost=_total(matrix, ordered))


def _close(value: float, target: float) -> bool:
    return value <= target + TIE_TOLERANCE * max(1.0, abs(target))


def hungarian(cost: ArrayLike) -> Assignment:
    """Minimum-cost maximum-cardinality assignment with a lexicographic tie-break.

    Slots are fixed in ascending order; each takes the smallest annotation
    index (or stays unmatched, which sorts last) that still allows an optimal
    completion of the remaining rows and columns.

    Example:
        >>> hungarian([[1, 2], [3, 0]]).pairs
        ((0, 0), (1, 1))
        >>> result = hungarian([[5, 1], [2, 4], [3, 3]])
        >>> result.pairs, result.unmatched, result.cost
        (((0, 1), (1, 0)), (2,), 3.0)
    """
    matrix = _as_cost(cost)
    rows, cols = matrix.shape
    target_pairs = min(rows, cols)
    best = _optimum(matrix, list(range(rows)), list(range(cols)))

    chosen: list[tuple[int, int]] = []
    used: set[int] = set()
    spent: list[float] = []
    for i in range(rows):
        rest_rows = list(range(i + 1, rows))
        options = [j for j in range(cols) if j not in used]
        for j in options:
            free_cols = [c for c in options if c != j]
            if len(chosen) + 1 + min(len(rest_rows), len(free_cols)) < target_pairs:
                continue
            total = math.fsum([*spent, float(matrix[i, j]), _optimum(matrix, rest_rows, free_cols)])
            if _close(total, best):
                chosen.append((i, j))
                used.add(j)
                spent.append(float(matrix[i, j]))
                break
    return _build(matrix, chosen)


def _injective_maps(rows: int, cols: int) -> Iterator[list[tuple[int, int]]]:
    if rows <= cols:
        for picked in permutations(range(cols), rows):
            yield list(enumerate(picked))
    else:
        for slots in combinations(range(rows), cols):
            for order in permutations(slots):
                yield sorted(zip(order, range(cols), strict=True))


def brute_force_assignment(cost: ArrayLike) -> Assignment:
    """Exhaustive reference solver with the same tie-break as :func:`hungarian`.

    Example:
        >>> brute_force_assignment([[5, 1], [2, 4], [3, 3]]).cost
        3.0
    """
    matrix = _as_cost(cost)
    candidates = [(_total(matrix, pairs), sorted(pairs)) for pairs in _injective_maps(*matrix.shape)]
    if not candidates:
        return _build(matrix, [])
    best = min(total for total, _ in candidates)
    return _build(matrix, min(pairs for total, pairs in candidates if _close(total, best)))


__all__ = [
    "TIE_TOLERANCE",
    "Assignment",
    "brute_force_assignment",
    "hungarian",
    "pairwise_cost",
]

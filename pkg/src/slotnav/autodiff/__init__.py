"""Minimal reverse-mode differentiation over dense float64 tensors."""

from __future__ import annotations

from . import ops
from .checkpoint import dump_checkpoint, load_checkpoint, parse_checkpoint, save_checkpoint
from .gradcheck import FiniteDifferenceReport, ParameterCheck, finite_difference_check
from .graph import GradientReport, Graph, evaluate, gradient, topological_order
from .tensor import Array, Tensor, Trace, as_tensor, record_branch, scope, tracing

__all__ = [
    "Array",
    "FiniteDifferenceReport",
    "GradientReport",
    "Graph",
    "ParameterCheck",
    "Tensor",
    "Trace",
    "as_tensor",
    "dump_checkpoint",
    "evaluate",
    "finite_difference_check",
    "gradient",
    "load_checkpoint",
    "ops",
    "parse_checkpoint",
    "record_branch",
    "save_checkpoint",
    "scope",
    "topological_order",
    "tracing",
]

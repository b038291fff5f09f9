"""slotnav - object-centric image-text retrieval for language-goal navigation.

Packages:
    * :mod:`slotnav.autodiff` - reverse-mode differentiation over float64 tensors.
    * :mod:`slotnav.model` - patch encoder, slot attention, box and embedding heads, frozen text encoder.
    * :mod:`slotnav.objectives` - box matching and the four training losses.
    * :mod:`slotnav.retrieval` - embedding index, top-k and average recall.
    * :mod:`slotnav.promptgen` - prompt templates and caption augmentation.
    * :mod:`slotnav.navsim` - grid world, planner and navigation episodes.
    * :mod:`slotnav.training` - schedule, gradient steps, overfit harness and run artifacts.
    * :mod:`slotnav.fixtures` - bundled desk-scale data.
"""

from __future__ import annotations

from . import __init__conf__
from .__init__conf__ import print_info
from .domain.errors import (
    ContractError,
    DataFormatError,
    GenerationError,
    NonFiniteError,
    ShapeError,
    SlotnavError,
    TrainingAbortedError,
)

__all__ = [
    "ContractError",
    "DataFormatError",
    "GenerationError",
    "NonFiniteError",
    "ShapeError",
    "SlotnavError",
    "TrainingAbortedError",
    "__init__conf__",
    "print_info",
]

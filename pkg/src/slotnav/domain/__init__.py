"""Domain layer: pure, framework-free types shared across the app."""

from __future__ import annotations

from .enums import MatchCost, OutputFormat, PromptStyle
from .errors import (
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
    "MatchCost",
    "NonFiniteError",
    "OutputFormat",
    "PromptStyle",
    "ShapeError",
    "SlotnavError",
    "TrainingAbortedError",
]

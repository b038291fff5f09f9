"""Error hierarchy shared by every slotnav package.

All library errors derive from :class:`SlotnavError` so the CLI boundary can
turn them into a single machine-readable line. Each concrete error also keeps
a familiar builtin base (``ValueError``, ``ArithmeticError``, ``RuntimeError``)
so callers that only know the standard library still catch them.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from collections.abc import Sequence
    from pathlib import Path


class SlotnavError(Exception):
    """Root of every error raised by slotnav."""

    #: short tag printed by the CLI as ``error: <kind>: ...``
    kind: str = "error"


class ContractError(SlotnavError, ValueError):
    """A precondition of an operation was violated.

    Example:
        >>> isinstance(ContractError("k must be >= 1"), ValueError)
        True
    """

    kind = "contract"


class ShapeError(ContractError):
    """Tensor shapes are inconsistent; the message names the offending node."""

    kind = "shape"


class NonFiniteError(SlotnavError, ArithmeticError):
    """A computation produced ``inf`` or ``nan``.

    Attributes:
        node: qualified name of the offending node, when known.
    """

    kind = "overflow"

    def __init__(self, message: str, *, node: str | None = None) -> None:
        super().__init__(message)
        self.node = node


class TrainingAbortedError(NonFiniteError):
    """The training loss became non-finite.

    Attributes:
        component: name of the loss component that failed (``L_C``, ``L_L1`` ...).
    """

    kind = "training"

    def __init__(self, component: str, value: float) -> None:
        super().__init__(f"loss component {component} is not finite ({value!r})")
        self.component = component
        self.value = value


class DataFormatError(SlotnavError, ValueError):
    """An input file is malformed.

    Example:
        >>> str(DataFormatError("bad pose", path="world.txt", line=3))
        'world.txt:3: bad pose'
    """

    kind = "data"

    def __init__(self, message: str, *, path: str | Path | None = None, line: int | None = None) -> None:
        location = ""
        if path is not None:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{location}{message}")
        self.path = path
        self.line = line
        self.reason = message


class GenerationError(SlotnavError, RuntimeError):
    """The text-generation client failed.

    Attributes:
        partial: generations collected before the failure.
        subject: the noun or sentence the request was about.
    """

    kind = "generation"

    def __init__(self, message: str, *, subject: str, partial: Sequence[str] = ()) -> None:
        super().__init__(f"{message} (subject: {subject!r})")
        self.subject = subject
        self.partial = list(partial)


__all__ = [
    "ContractError",
    "DataFormatError",
    "GenerationError",
    "NonFiniteError",
    "ShapeError",
    "SlotnavError",
    "TrainingAbortedError",
]

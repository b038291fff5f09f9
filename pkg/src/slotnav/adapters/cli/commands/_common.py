"""Helpers shared by the model and evaluation commands.

Every command reports results the same way: one JSON record per line on
stdout, then a Rich summary table. Library errors become one stderr line
``error: <kind>: <message>`` and an :class:`ExitCode`.
"""

from __future__ import annotations

import logging
from collections.abc import Iterator, Mapping, Sequence
from contextlib import contextmanager
from pathlib import Path
from typing import TYPE_CHECKING, Any

import orjson
import rich_click as click
from rich.console import Console
from rich.table import Table

from slotnav.autodiff import Array, load_checkpoint
from slotnav.domain.errors import ContractError, DataFormatError, SlotnavError
from slotnav.model import init_parameters

from ..exit_codes import ExitCode

if TYPE_CHECKING:
    from slotnav.model import EncoderConfig

logger = logging.getLogger(__name__)


def exit_code_for(exc: BaseException) -> ExitCode:
    """Exit code of a failure caught at the command boundary.

    Example:
        >>> exit_code_for(ContractError("k must be >= 1"))
        <ExitCode.INVALID_ARGUMENT: 22>
    """
    if isinstance(exc, FileNotFoundError):
        return ExitCode.FILE_NOT_FOUND
    if isinstance(exc, PermissionError):
        return ExitCode.PERMISSION_DENIED
    if isinstance(exc, ContractError):
        return ExitCode.INVALID_ARGUMENT
    return ExitCode.GENERAL_ERROR


def error_line(exc: BaseException) -> str:
    """Machine-readable ``error: <kind>: <message>`` line.

    Example:
        >>> error_line(DataFormatError("bad pose", path="memory.jsonl", line=3))
        'error: data: memory.jsonl:3: bad pose'
    """
    if isinstance(exc, SlotnavError):
        return f"error: {exc.kind}: {exc}"
    if isinstance(exc, FileNotFoundError):
        return f"error: missing: {exc.filename or exc}"
    return f"error: io: {exc}"


@contextmanager
def reporting_errors(command: str) -> Iterator[None]:
    """Turn library and file errors raised inside the block into an exit code."""
    try:
        yield
    except (SlotnavError, OSError) as exc:
        logger.error("command failed", extra={"command": command, "error": str(exc), "kind": type(exc).__name__})
        click.echo(error_line(exc), err=True)
        raise SystemExit(exit_code_for(exc)) from exc


def emit_record(record: Mapping[str, Any]) -> None:
    """Write ``record`` as one JSON line on stdout."""
    click.echo(orjson.dumps(dict(record)).decode())


def emit_table(title: str, columns: Sequence[str], rows: Sequence[Sequence[object]]) -> None:
    table = Table(title=title)
    for column in columns:
        table.add_column(column)
    for row in rows:
        table.add_row(*(f"{value:.4f}" if isinstance(value, float) else str(value) for value in row))
    Console(file=click.get_text_stream("stdout"), soft_wrap=True).print(table)


def model_parameters(config: EncoderConfig, checkpoint: str | None) -> dict[str, Array]:
    """Parameters from ``checkpoint`` or, without one, freshly initialised from ``config``.

    Raises:
        ContractError: the checkpoint lacks a parameter ``config`` needs or has the wrong shape.
    """
    fresh = init_parameters(config)
    if checkpoint is None:
        return fresh
    loaded = load_checkpoint(checkpoint)
    missing = sorted(set(fresh) - set(loaded))
    if missing:
        raise ContractError(f"checkpoint {checkpoint} lacks parameters: {', '.join(missing[:5])}")
    for name, value in fresh.items():
        if loaded[name].shape != value.shape:
            raise ContractError(f"checkpoint parameter {name} has shape {loaded[name].shape}, expected {value.shape}")
    return loaded


def read_lines(path: str | Path) -> list[str]:
    """Non-blank lines of a UTF-8 text file."""
    return [line.strip() for line in Path(path).read_text(encoding="utf-8").splitlines() if line.strip()]


__all__ = [
    "emit_record",
    "emit_table",
    "error_line",
    "exit_code_for",
    "model_parameters",
    "read_lines",
    "reporting_errors",
]

"""Typed option decorators and the option shapes the slotnav commands share.

rich_click types ``option`` and ``version_option`` with a partially unknown
return, which pyright strict rejects at every call site; the wrappers below
forward to rich_click unchanged (so help still renders through ``RichOption``)
behind a fully typed ``Protocol``.
"""

from __future__ import annotations

from collections.abc import Callable
from typing import Any, Final, Protocol, cast

import rich_click as click

CommandDecorator = Callable[[Callable[..., Any]], Callable[..., Any]]

#: ``-h`` works everywhere ``--help`` does.
CLICK_CONTEXT_SETTINGS: Final[dict[str, list[str]]] = {"help_option_names": ["-h", "--help"]}

#: Traceback character budget without ``--traceback``.
TRACEBACK_SUMMARY_LIMIT: Final[int] = 500
#: Traceback character budget with ``--traceback``.
TRACEBACK_VERBOSE_LIMIT: Final[int] = 10_000

#: An existing regular file (records, worlds, LZE1/LZP1 files).
INPUT_FILE: Final = click.Path(exists=True, dir_okay=False)
#: A file the command creates or replaces.
OUTPUT_FILE: Final = click.Path(dir_okay=False)
#: An existing directory (image folders).
INPUT_DIR: Final = click.Path(exists=True, file_okay=False)


class _Decorators(Protocol):
    option: Callable[..., CommandDecorator]
    version_option: Callable[..., CommandDecorator]


_click = cast("_Decorators", click)


def option(*param_decls: str, **attrs: Any) -> CommandDecorator:
    """:func:`rich_click.option` with a complete signature."""
    return _click.option(*param_decls, **attrs)


def version_option(*param_decls: str, **attrs: Any) -> CommandDecorator:
    """:func:`rich_click.version_option` with a complete signature."""
    return _click.version_option(*param_decls, **attrs)


def checkpoint_option(help_text: str = "Model parameters (LZP1).") -> CommandDecorator:
    """``--checkpoint PATH``; ``None`` means freshly initialised parameters from ``[encoder]``."""
    return option("--checkpoint", type=INPUT_FILE, default=None, help=help_text)


__all__ = [
    "CLICK_CONTEXT_SETTINGS",
    "INPUT_DIR",
    "INPUT_FILE",
    "OUTPUT_FILE",
    "TRACEBACK_SUMMARY_LIMIT",
    "TRACEBACK_VERBOSE_LIMIT",
    "CommandDecorator",
    "checkpoint_option",
    "option",
    "version_option",
]

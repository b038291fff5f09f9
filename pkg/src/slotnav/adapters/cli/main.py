"""Process entry: run the group, turn every outcome into an exit code.

``lib_cli_exit_tools.run_cli`` cannot hand ``ctx.obj`` to the group, so the
same boundary is written out here: Click's own exits pass through, commands
that ``SystemExit`` with a code keep it, and anything unexpected is printed
by lib_cli_exit_tools (summary, or full traceback with ``--traceback``).
"""

from __future__ import annotations

import sys
import threading
from typing import TYPE_CHECKING

import click
import lib_cli_exit_tools
import lib_log_rich.runtime

from slotnav import __init__conf__

from .context import TracebackState
from .options import TRACEBACK_SUMMARY_LIMIT, TRACEBACK_VERBOSE_LIMIT
from .root import cli

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from slotnav.composition import AppServices


def _system_exit_code(exc: SystemExit) -> int:
    if exc.code is None:
        return 0
    if isinstance(exc.code, int):
        return exc.code
    click.echo(exc.code, err=True)
    return 1


def _unexpected_error_code(exc: BaseException) -> int:
    verbose = bool(lib_cli_exit_tools.config.traceback)
    lib_cli_exit_tools.config.traceback_force_color = verbose
    lib_cli_exit_tools.print_exception_message(
        trace_back=verbose, length_limit=TRACEBACK_VERBOSE_LIMIT if verbose else TRACEBACK_SUMMARY_LIMIT
    )
    return lib_cli_exit_tools.get_system_exit_code(exc)


def _run_cli(argv: Sequence[str] | None, services_factory: Callable[[], AppServices]) -> int:
    args = sys.argv[1:] if argv is None else list(argv)
    try:
        cli.main(args=args, prog_name=__init__conf__.shell_command, obj=services_factory, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except SystemExit as exc:
        # failed gradchecks, unconverged overfits and reported library errors exit this way
        return _system_exit_code(exc)
    except BaseException as exc:
        return _unexpected_error_code(exc)
    return 0


def main(
    argv: Sequence[str] | None = None,
    *,
    restore_traceback: bool = True,
    services_factory: Callable[[], AppServices] | None = None,
) -> int:
    """Run ``slotnav`` with ``argv`` (``None``: ``sys.argv``) and return the exit code.

    ``restore_traceback`` puts the lib_cli_exit_tools traceback flags back
    afterwards, so tests and embedding callers see no leftover state. The log
    runtime is shut down when called from the main thread.

    Raises:
        ValueError: no ``services_factory``; pass ``build_production`` or ``build_testing``.

    Example:
        >>> from slotnav.composition import build_testing
        >>> main(["--version"], services_factory=build_testing)  # doctest: +SKIP
        0
    """
    if services_factory is None:
        raise ValueError("services_factory is required; pass build_production from slotnav.composition")

    previous = TracebackState.capture()
    try:
        return _run_cli(argv, services_factory)
    finally:
        if restore_traceback:
            previous.restore()
        if threading.current_thread() is threading.main_thread() and lib_log_rich.runtime.is_initialised():
            lib_log_rich.runtime.shutdown()


__all__ = ["main"]

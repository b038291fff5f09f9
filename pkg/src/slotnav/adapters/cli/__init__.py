"""Command-line adapter: the ``slotnav`` rich-click group and its entry point."""

from __future__ import annotations

from .commands import (
    cli_augment,
    cli_config,
    cli_eval_retrieval,
    cli_gradcheck,
    cli_index,
    cli_info,
    cli_nav_eval,
    cli_retrieve,
    cli_train,
)
from .context import (
    CLIContext,
    OverrideRecipe,
    TracebackState,
    apply_traceback_preferences,
    get_cli_context,
    store_cli_context,
)
from .exit_codes import ExitCode
from .main import main
from .options import CLICK_CONTEXT_SETTINGS, TRACEBACK_SUMMARY_LIMIT, TRACEBACK_VERBOSE_LIMIT
from .root import cli

__all__ = [
    "CLICK_CONTEXT_SETTINGS",
    "TRACEBACK_SUMMARY_LIMIT",
    "TRACEBACK_VERBOSE_LIMIT",
    "CLIContext",
    "ExitCode",
    "OverrideRecipe",
    "TracebackState",
    "apply_traceback_preferences",
    "cli",
    "cli_augment",
    "cli_config",
    "cli_eval_retrieval",
    "cli_gradcheck",
    "cli_index",
    "cli_info",
    "cli_nav_eval",
    "cli_retrieve",
    "cli_train",
    "get_cli_context",
    "main",
    "store_cli_context",
]

"""CLI command implementations, re-exported for registration with the root group."""

from __future__ import annotations

from .augment import cli_augment
from .config import cli_config
from .gradcheck import cli_gradcheck
from .info import cli_info
from .navigation import cli_nav_eval
from .retrieval import cli_eval_retrieval, cli_index, cli_retrieve
from .train import cli_train

__all__ = [
    "cli_augment",
    "cli_config",
    "cli_eval_retrieval",
    "cli_gradcheck",
    "cli_index",
    "cli_info",
    "cli_nav_eval",
    "cli_retrieve",
    "cli_train",
]

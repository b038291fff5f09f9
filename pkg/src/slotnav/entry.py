"""``slotnav`` console script.

Composition happens here, at package level, because ``adapters.cli`` may not
import ``composition`` (see the import-linter contracts in ``pyproject.toml``).
"""

from __future__ import annotations

from collections.abc import Sequence

from .adapters.cli.main import main as cli_main
from .composition import build_production


def main(argv: Sequence[str] | None = None) -> int:
    """Run the CLI on production adapters and return its exit code."""
    return cli_main(argv, services_factory=build_production)


__all__ = ["main"]

"""Fixtures shared by the slotnav suites.

Every CLI test runs with ``SLOTNAV___*`` variables cleared so a developer's
shell cannot change the numbers a test asserts on.
"""

from __future__ import annotations

import contextlib
import os
import re
import tempfile
from pathlib import Path
from typing import TYPE_CHECKING

import lib_cli_exit_tools
import numpy as np
import pytest
from click.testing import CliRunner
from hypothesis import settings

if TYPE_CHECKING:
    from collections.abc import Callable, Iterator

_COVERAGE_FILE = Path(tempfile.gettempdir()) / ".coverage.slotnav"
_ENV_PREFIX = "SLOTNAV___"
_ANSI = re.compile(r"\x1B\[[0-?]*[ -/]*[@-~]")

# CI replays the same examples on every runner.
settings.register_profile("ci", derandomize=True, print_blob=True)
if os.environ.get("CI"):
    settings.load_profile("ci")


def pytest_configure(config: pytest.Config) -> None:
    """Keep coverage's SQLite file on local disk; clear sidecars a crashed run left behind."""
    if "COVERAGE_FILE" in os.environ:
        return
    for suffix in ("", "-journal", "-wal", "-shm"):
        with contextlib.suppress(FileNotFoundError):
            Path(f"{_COVERAGE_FILE}{suffix}").unlink()
    os.environ["COVERAGE_FILE"] = str(_COVERAGE_FILE)


@pytest.fixture(autouse=True)
def _no_slotnav_environment(monkeypatch: pytest.MonkeyPatch) -> None:
    for key in [key for key in os.environ if key.upper().startswith(_ENV_PREFIX)]:
        monkeypatch.delenv(key)


@pytest.fixture
def rng() -> np.random.Generator:
    """A fixed-seed generator; tests that need two streams derive the second from it."""
    return np.random.default_rng(20240607)


@pytest.fixture
def cli_runner() -> CliRunner:
    return CliRunner()


@pytest.fixture
def production_factory() -> Callable[[], object]:
    """Real configuration layers, passed to the CLI as ``obj=``."""
    from slotnav.composition import build_production

    return build_production


@pytest.fixture
def testing_factory() -> Callable[[], object]:
    """Model defaults only: no files, no environment, no ``--config``."""
    from slotnav.composition import build_testing

    return build_testing


@pytest.fixture
def strip_ansi() -> Callable[[str], str]:
    return lambda value: _ANSI.sub("", value)


@pytest.fixture
def managed_traceback_state() -> Iterator[None]:
    """Start from short tracebacks and leave lib_cli_exit_tools as it was found."""
    before = (lib_cli_exit_tools.config.traceback, lib_cli_exit_tools.config.traceback_force_color)
    lib_cli_exit_tools.reset_config()
    lib_cli_exit_tools.config.traceback = False
    lib_cli_exit_tools.config.traceback_force_color = False
    try:
        yield
    finally:
        lib_cli_exit_tools.reset_config()
        lib_cli_exit_tools.config.traceback, lib_cli_exit_tools.config.traceback_force_color = before

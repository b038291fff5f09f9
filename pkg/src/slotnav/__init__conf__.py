"""Static package metadata: ``info`` output, config layer ids, manifest version.

Values mirror ``pyproject.toml``; ``tests/test_metadata.py`` keeps them in
step. Nothing here reads installed distribution metadata at runtime.
"""

from __future__ import annotations

import platform
import sys
from importlib import import_module

name = "slotnav"
title = "Object-centric image-text retrieval for language-goal navigation at desk scale"
#: Stamped into every training manifest next to the config hash.
version = "0.1.0"
homepage = "https://github.com/bitranox/slotnav"
author = "bitranox"
author_email = "bitranox@gmail.com"
shell_command = "slotnav"

#: lib_layered_config vendor and app ids (macOS/Windows paths).
LAYEREDCONF_VENDOR: str = "bitranox"
LAYEREDCONF_APP: str = "slotnav"
#: Linux config directory name and ``SLOTNAV___`` environment prefix.
LAYEREDCONF_SLUG: str = "slotnav"

#: Numeric libraries whose versions change results bit-for-bit.
NUMERIC_STACK: tuple[str, ...] = ("numpy", "scipy")


def runtime_versions() -> dict[str, str]:
    """Interpreter and numeric-library versions of this process.

    Example:
        >>> sorted(runtime_versions())
        ['numpy', 'python', 'scipy']
    """
    versions = {"python": platform.python_version()}
    for module in NUMERIC_STACK:
        versions[module] = str(getattr(import_module(module), "__version__", "unknown"))
    return versions


def info_fields() -> list[tuple[str, str]]:
    """``(label, value)`` pairs in display order, package first, runtime last."""
    fields = [
        ("name", name),
        ("title", title),
        ("version", version),
        ("homepage", homepage),
        ("author", author),
        ("author_email", author_email),
        ("shell_command", shell_command),
    ]
    fields.extend(runtime_versions().items())
    return fields


def print_info() -> None:
    """Write the aligned metadata block the ``info`` command shows.

    Example:
        >>> print_info()  # doctest: +ELLIPSIS
        Info for slotnav:
        ...
    """
    fields = info_fields()
    pad = max(len(label) for label, _ in fields)
    lines = [f"Info for {name}:", ""]
    lines.extend(f"    {label.ljust(pad)} = {value}" for label, value in fields)
    sys.stdout.write("\n".join(lines) + "\n")


__all__ = [
    "LAYEREDCONF_APP",
    "LAYEREDCONF_SLUG",
    "LAYEREDCONF_VENDOR",
    "NUMERIC_STACK",
    "author",
    "author_email",
    "homepage",
    "info_fields",
    "name",
    "print_info",
    "runtime_versions",
    "shell_command",
    "title",
    "version",
]

"""Layered configuration for slotnav.

Lowest first: the bundled ``defaultconfig.toml`` with ``defaultconfig.d/*.toml``
(desk-scale values for every section), then app, host and user files, a
``.env`` file and ``SLOTNAV___SECTION__KEY`` variables. The CLI adds
``--set``, ``--config``, ``--seed`` and ``--offline`` on top.
"""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path

from lib_layered_config import DEFAULT_MAX_PROFILE_LENGTH, Config, read_config, validate_profile_name

try:
    from lib_layered_config import ValidationError as _ProfileError
except ImportError:  # pragma: no cover - releases before 5.x raised ValueError
    _ProfileError = ValueError

from slotnav import __init__conf__

#: Bundled defaults; ``defaultconfig.d/`` next to it is read as drop-ins.
DEFAULT_CONFIG_FILE = Path(__file__).with_name("defaultconfig.toml")


def validate_profile(profile: str) -> None:
    """Profile names end up in filesystem paths; refuse anything that could escape them.

    Raises:
        ValueError: the name is empty, too long or contains path characters.

    Example:
        >>> validate_profile("desk-overfit")
        >>> validate_profile("../etc")  # doctest: +IGNORE_EXCEPTION_DETAIL
        Traceback (most recent call last):
        ValueError: ...
    """
    try:
        validate_profile_name(profile, max_length=DEFAULT_MAX_PROFILE_LENGTH)
    except _ProfileError as exc:
        raise ValueError(str(exc)) from exc


@lru_cache(maxsize=4)
def _read(profile: str | None, start_dir: str | None, dotenv_path: str | None) -> Config:
    return read_config(
        vendor=__init__conf__.LAYEREDCONF_VENDOR,
        app=__init__conf__.LAYEREDCONF_APP,
        slug=__init__conf__.LAYEREDCONF_SLUG,
        profile=profile,
        default_file=DEFAULT_CONFIG_FILE,
        start_dir=start_dir,
        dotenv_path=dotenv_path,
    )


def get_config(*, profile: str | None = None, start_dir: str | None = None, dotenv_path: str | None = None) -> Config:
    """Merged configuration for ``profile``; cached per argument triple.

    Args:
        profile: inserts ``profile/<name>/`` into every configuration path.
        start_dir: where the upward ``.env`` search starts (default: cwd).
        dotenv_path: one explicit ``.env`` file instead of the search.

    Raises:
        ValueError: ``profile`` is not a usable name.

    Example:
        >>> get_config().get("train", default={})["batch_size"]
        4
    """
    if profile is not None:
        validate_profile(profile)
    return _read(profile, start_dir, dotenv_path)


__all__ = ["DEFAULT_CONFIG_FILE", "get_config", "validate_profile"]

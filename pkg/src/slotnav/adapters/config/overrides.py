"""Configuration overrides from ``--set``, ``--config`` files and global flags.

All three end up as :class:`ConfigOverride` objects merged through
``Config.with_overrides`` in this order: ``--set`` strings, then every
``--config`` file in the order given, then ``--seed`` / ``--offline``.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, cast

import orjson

if TYPE_CHECKING:
    from lib_layered_config import Config

CoercedValue = str | int | float | bool | None | list[object] | dict[str, object]
"""Union of types that :func:`coerce_value` can produce."""

#: config keys a global ``--seed`` sets
SEED_KEYS = ("train.seed", "encoder.seed", "generation.seed")


@dataclass(frozen=True, slots=True)
class ConfigOverride:
    """A single parsed configuration override."""

    section: str
    key_path: tuple[str, ...]
    value: CoercedValue


def parse_override(raw: str) -> ConfigOverride:
    """Split ``SECTION.KEY[.SUBKEY...]=VALUE`` into a :class:`ConfigOverride`.

    The first ``=`` separates the dotted path from the value; whitespace
    around both is dropped, so ``train.seed = 3`` parses like ``train.seed=3``.
    Values are coerced via :func:`coerce_value`.

    Raises:
        ValueError: the string lacks ``=``, has no dot in the key, or has an
            empty section or key component.

    Examples:
        >>> override = parse_override("train.learning_rate=0.05")
        >>> override.section, override.key_path, override.value
        ('train', ('learning_rate',), 0.05)

        >>> parse_override("navigation.radii = [1.0, 3.0]").value
        [1.0, 3.0]
    """
    if "=" not in raw:
        raise ValueError(f"Invalid override {raw!r}: must contain '='")

    path_part, value_str = (part.strip() for part in raw.split("=", maxsplit=1))

    if "." not in path_part:
        raise ValueError(f"Invalid override {raw!r}: key must contain at least one dot (SECTION.KEY)")

    section, *key_parts = path_part.split(".")
    if not section:
        raise ValueError(f"Invalid override {raw!r}: section name is empty")
    if not all(key_parts):
        raise ValueError(f"Invalid override {raw!r}: key path contains empty component")

    return ConfigOverride(section=section, key_path=tuple(key_parts), value=coerce_value(value_str))


def coerce_value(raw: str) -> CoercedValue:
    """JSON value when ``raw`` parses as one, else the raw string.

    Examples:
        >>> coerce_value("true"), coerce_value("42"), coerce_value("one_minus_giou")
        (True, 42, 'one_minus_giou')
        >>> coerce_value("")
        ''
    """
    if raw == "":
        return ""
    try:
        return orjson.loads(raw)
    except (orjson.JSONDecodeError, ValueError):
        return raw


def parse_config_text(text: str, *, source: str = "<config>") -> list[ConfigOverride]:
    """Parse ``section.key = value`` lines; blank lines and ``#`` comments are skipped.

    Raises:
        ValueError: a line is malformed; the message starts with ``source:line:``.

    Example:
        >>> [o.value for o in parse_config_text("# desk run\\ntrain.seed = 7\\n\\ntrain.total_steps = 40")]
        [7, 40]
    """
    overrides: list[ConfigOverride] = []
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            overrides.append(parse_override(stripped))
        except ValueError as exc:
            raise ValueError(f"{source}:{number}: {exc}") from exc
    return overrides


def flag_overrides(*, seed: int | None = None, offline: bool = False) -> list[ConfigOverride]:
    """Overrides for the global ``--seed`` and ``--offline`` flags.

    Example:
        >>> [(o.section, o.value) for o in flag_overrides(seed=3, offline=True)]
        [('train', 3), ('encoder', 3), ('generation', 3), ('generation', True)]
    """
    overrides = [parse_override(f"{key}={seed}") for key in SEED_KEYS] if seed is not None else []
    if offline:
        overrides.append(ConfigOverride(section="generation", key_path=("offline",), value=True))
    return overrides


def _nest_override(target: dict[str, dict[str, object]], override: ConfigOverride) -> None:
    """Build a nested override dict from a parsed ConfigOverride.

    Examples:
        >>> d: dict[str, dict[str, object]] = {}
        >>> _nest_override(d, ConfigOverride(section="new", key_path=("x", "y"), value=3))
        >>> d["new"]["x"]["y"]
        3
    """
    node: dict[str, object] = target.setdefault(override.section, {})
    for part in override.key_path[:-1]:
        existing = node.setdefault(part, {})
        if not isinstance(existing, dict):
            msg = f"Expected dict at key {part!r}, got {type(existing).__name__}"
            raise TypeError(msg)
        node = cast("dict[str, object]", existing)
    node[override.key_path[-1]] = override.value


def merge_overrides(config: Config, overrides: Iterable[ConfigOverride]) -> Config:
    """Deep-merge parsed overrides into ``config``; later ones win."""
    nested: dict[str, dict[str, object]] = {}
    for override in overrides:
        _nest_override(nested, override)
    if not nested:
        return config
    return config.with_overrides(nested)


def apply_overrides(config: Config, raw_overrides: tuple[str, ...]) -> Config:
    """Deep-merge ``--set`` strings into a Config instance.

    Raises:
        ValueError: If any override string is malformed.

    Examples:
        >>> from lib_layered_config import Config
        >>> cfg = Config({"s": {"k": 1}}, {"s.k": {"layer": "default", "path": None, "key": "s.k"}})
        >>> apply_overrides(cfg, ("s.k=2",))["s"]["k"]
        2
        >>> apply_overrides(cfg, ()) is cfg
        True
    """
    if not raw_overrides:
        return config
    return merge_overrides(config, [parse_override(raw) for raw in raw_overrides])


def apply_config_files(config: Config, paths: Sequence[str]) -> Config:
    """Merge each ``--config`` file, in order, over ``config``.

    Raises:
        ValueError: a line is malformed (message names file and line).
        OSError: a file cannot be read.
    """
    overrides: list[ConfigOverride] = []
    for path in paths:
        overrides.extend(parse_config_text(Path(path).read_text(encoding="utf-8"), source=str(path)))
    return merge_overrides(config, overrides)


__all__ = [
    "SEED_KEYS",
    "CoercedValue",
    "ConfigOverride",
    "apply_config_files",
    "apply_overrides",
    "coerce_value",
    "flag_overrides",
    "merge_overrides",
    "parse_config_text",
    "parse_override",
]

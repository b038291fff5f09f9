"""The bundled 15x15 navigation world and its memory."""

from __future__ import annotations

from pathlib import Path

import orjson

from ..navsim import GridWorld, LookupEncoder, MemoryEntry, NavQuery, parse_world, read_memory, read_nav_queries

WORLD15 = "world15"


def data_path(name: str) -> Path:
    """Filesystem path of a bundled data file."""
    return Path(__file__).parent / "data" / name


def load_world15(*, cell_m: float = 0.25) -> GridWorld:
    path = data_path(f"{WORLD15}.txt")
    return parse_world(path.read_text(encoding="utf-8"), cell_m=cell_m, source=str(path))


def world15_memory() -> list[MemoryEntry]:
    return read_memory(data_path(f"{WORLD15}_memory.jsonl"))


def world15_queries() -> list[NavQuery]:
    return read_nav_queries(data_path(f"{WORLD15}_queries.jsonl"))


def world15_encoder() -> LookupEncoder:
    table = orjson.loads(data_path(f"{WORLD15}_encoder.json").read_bytes())
    return LookupEncoder(table)


__all__ = ["WORLD15", "data_path", "load_world15", "world15_encoder", "world15_memory", "world15_queries"]

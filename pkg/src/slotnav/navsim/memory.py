"""Image-pose memory, navigation queries and query encoders."""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import numpy as np
import orjson
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..autodiff import Array
from ..domain.errors import ContractError, DataFormatError
from ..model import EncoderConfig, constants, encode_text
from ..promptgen.templates import DEFAULT_TEMPLATE, PromptTemplate
from ..retrieval import NORM_TOLERANCE, EmbeddingIndex, build_index
from .geometry import Pose


@dataclass(frozen=True, slots=True, eq=False)
class MemoryEntry:
    """An observation: image id, the pose it was taken from and its unit embedding."""

    image_id: str
    pose: Pose
    embedding: Array = field(repr=False)

    def __post_init__(self) -> None:
        vector = np.asarray(self.embedding, dtype=np.float64).reshape(-1)
        if vector.size == 0 or abs(float(np.linalg.norm(vector)) - 1.0) > NORM_TOLERANCE:
            raise ContractError(f"memory entry {self.image_id!r} needs a unit-norm embedding")
        vector.setflags(write=False)
        object.__setattr__(self, "embedding", vector)

    @classmethod
    def normalized(cls, image_id: str, pose: Pose, embedding: ArrayLike) -> MemoryEntry:
        vector = np.asarray(embedding, dtype=np.float64).reshape(-1)
        norm = float(np.linalg.norm(vector))
        if norm == 0.0:
            raise ContractError(f"memory entry {image_id!r} has a zero embedding")
        return cls(image_id, pose, vector / norm)


def memory_index(memory: Sequence[MemoryEntry]) -> EmbeddingIndex:
    if not memory:
        raise ContractError("memory must not be empty")
    return build_index(np.stack([entry.embedding for entry in memory]), [entry.image_id for entry in memory])


@dataclass(frozen=True, slots=True)
class NavQuery:
    """A navigation request and the world object that satisfies it."""

    query: str
    target: str


class QueryEncoder(Protocol):
    """Map a query text to a ``(D,)`` embedding."""

    def __call__(self, query: str) -> Array: ...


@dataclass(frozen=True, slots=True)
class LookupEncoder:
    """Fixed query -> embedding table.

    Example:
        >>> encoder = LookupEncoder({"sofa": [1.0, 0.0]})
        >>> encoder("sofa").tolist()
        [1.0, 0.0]
    """

    table: Mapping[str, ArrayLike]

    def __call__(self, query: str) -> Array:
        if query not in self.table:
            raise ContractError(f"no embedding for query {query!r}")
        return np.asarray(self.table[query], dtype=np.float64)


@dataclass(frozen=True, slots=True)
class TextModelEncoder:
    """Frozen text encoder applied to the query rendered by ``template``.

    A query written as ``noun. sentence`` is re-rendered with ``template``; a
    bare noun or sentence passes through unchanged.
    """

    parameters: Mapping[str, Array]
    config: EncoderConfig
    template: PromptTemplate = DEFAULT_TEMPLATE

    def __call__(self, query: str) -> Array:
        noun, sentence = DEFAULT_TEMPLATE.parse(query)
        return encode_text(self.template.render(noun, sentence), constants(self.parameters), self.config)


class _PoseModel(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    x: float
    y: float
    theta: float = 0.0


class _MemoryRecord(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    image_id: str = Field(min_length=1)
    pose: _PoseModel
    embedding: list[float] = Field(min_length=1)


class _QueryRecord(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    query: str = Field(min_length=1)
    target: str = Field(min_length=1)


def _reason(exc: ValidationError | ContractError) -> str:
    if isinstance(exc, ValidationError):
        first = exc.errors()[0]
        return f"{'.'.join(str(part) for part in first['loc'])}: {first['msg']}"
    return str(exc)


def _json_lines(path: Path) -> Iterable[tuple[int, object]]:
    with path.open("rb") as handle:
        for number, raw in enumerate(handle, start=1):
            if not raw.strip():
                continue
            try:
                yield number, orjson.loads(raw)
            except orjson.JSONDecodeError as exc:
                raise DataFormatError(f"invalid JSON: {exc}", path=path, line=number) from exc


def read_memory(path: str | Path) -> list[MemoryEntry]:
    """Read ``{"image_id", "pose": {"x", "y", "theta"}, "embedding": [...]}`` lines.

    Embeddings are normalised on load.

    Raises:
        DataFormatError: malformed line, zero embedding or mixed dimensions.
    """
    source = Path(path)
    entries: list[MemoryEntry] = []
    for number, data in _json_lines(source):
        try:
            record = _MemoryRecord.model_validate(data)
            entry = MemoryEntry.normalized(
                record.image_id, Pose(record.pose.x, record.pose.y, record.pose.theta), record.embedding
            )
        except (ValidationError, ContractError) as exc:
            raise DataFormatError(_reason(exc), path=source, line=number) from exc
        if entries and entry.embedding.size != entries[0].embedding.size:
            raise DataFormatError("embedding dimension differs from the first entry", path=source, line=number)
        entries.append(entry)
    return entries


def write_memory(path: str | Path, memory: Iterable[MemoryEntry]) -> Path:
    target = Path(path)
    with target.open("wb") as handle:
        for entry in memory:
            record = {"image_id": entry.image_id, "pose": entry.pose.as_dict(), "embedding": entry.embedding.tolist()}
            handle.write(orjson.dumps(record) + b"\n")
    return target


def read_nav_queries(path: str | Path) -> list[NavQuery]:
    """Read ``{"query": ..., "target": object_id}`` lines."""
    source = Path(path)
    queries: list[NavQuery] = []
    for number, data in _json_lines(source):
        try:
            record = _QueryRecord.model_validate(data)
        except ValidationError as exc:
            raise DataFormatError(_reason(exc), path=source, line=number) from exc
        queries.append(NavQuery(record.query, record.target))
    return queries


__all__ = [
    "LookupEncoder",
    "MemoryEntry",
    "NavQuery",
    "QueryEncoder",
    "TextModelEncoder",
    "memory_index",
    "read_memory",
    "read_nav_queries",
    "write_memory",
]

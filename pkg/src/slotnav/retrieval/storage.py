"""Embedding and ground-truth files.

LZE1 embedding file (integers unsigned 32-bit little-endian)::

    b"LZE1" | N | D | N*D float32 LE values, row-major | N newline-terminated UTF-8 ids

Ground truth is line-delimited ``query_id<TAB>image_id``; blank lines and
lines starting with ``#`` are skipped.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..domain.errors import ContractError, DataFormatError
from .index import EmbeddingIndex, build_index
from .recall import GroundTruth

MAGIC = b"LZE1"
_HEADER = struct.Struct("<4sII")


def dump_embeddings(index: EmbeddingIndex) -> bytes:
    """Serialise ``index``; values are stored as float32.

    Example:
        >>> blob = dump_embeddings(build_index([[1.0, 0.0]], ["a"]))
        >>> blob[:4], len(blob)
        (b'LZE1', 22)
    """
    for item in index.ids:
        if "\n" in item or "\r" in item:
            raise ContractError(f"id {item!r} contains a line break")
    values = np.ascontiguousarray(index.matrix, dtype="<f4").tobytes()
    names = "".join(f"{item}\n" for item in index.ids).encode("utf-8")
    return _HEADER.pack(MAGIC, len(index), index.dim) + values + names


def parse_embeddings(blob: bytes, *, source: str = "<bytes>") -> EmbeddingIndex:
    """Inverse of :func:`dump_embeddings`; rows are re-normalised in float64.

    Raises:
        DataFormatError: bad magic, truncated values or an id count mismatch.
    """
    if len(blob) < _HEADER.size:
        raise DataFormatError("truncated embedding header", path=source)
    magic, count, dim = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise DataFormatError("not an LZE1 embedding file (bad magic)", path=source)
    end = _HEADER.size + count * dim * 4
    if len(blob) < end:
        raise DataFormatError(f"truncated values: expected {count}x{dim} floats", path=source)
    values = np.frombuffer(blob, dtype="<f4", count=count * dim, offset=_HEADER.size).astype(np.float64)
    try:
        text = blob[end:].decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DataFormatError(f"ids are not valid UTF-8: {exc.reason}", path=source) from exc
    if text and not text.endswith("\n"):
        raise DataFormatError("last id is not newline-terminated", path=source)
    ids = text.split("\n")[:-1]
    if len(ids) != count:
        raise DataFormatError(f"header announces {count} ids, found {len(ids)}", path=source)
    try:
        return build_index(values.reshape(count, dim), ids, renormalize=False)
    except ContractError as exc:
        raise DataFormatError(str(exc), path=source) from exc


def write_embeddings(path: str | Path, index: EmbeddingIndex) -> Path:
    target = Path(path)
    target.write_bytes(dump_embeddings(index))
    return target


def read_embeddings(path: str | Path) -> EmbeddingIndex:
    source = Path(path)
    return parse_embeddings(source.read_bytes(), source=str(source))


def parse_ground_truth(text: str, *, source: str = "<text>") -> GroundTruth:
    """Read ``query_id<TAB>image_id`` lines.

    Example:
        >>> parse_ground_truth("q1\\timg1\\n# note\\nq1\\timg2\\n").targets("q1") == {"img1", "img2"}
        True
    """
    pairs: list[tuple[str, str]] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2 or not all(item.strip() for item in fields):  # noqa: PLR2004
            raise DataFormatError("expected 'query_id<TAB>image_id'", path=source, line=number)
        pairs.append((fields[0].strip(), fields[1].strip()))
    return GroundTruth.from_pairs(pairs)


def read_ground_truth(path: str | Path) -> GroundTruth:
    source = Path(path)
    return parse_ground_truth(source.read_text(encoding="utf-8"), source=str(source))


def write_ground_truth(path: str | Path, ground_truth: GroundTruth) -> Path:
    target = Path(path)
    target.write_text("".join(f"{query}\t{item}\n" for query, item in ground_truth.pairs()), encoding="utf-8")
    return target


__all__ = [
    "MAGIC",
    "dump_embeddings",
    "parse_embeddings",
    "parse_ground_truth",
    "read_embeddings",
    "read_ground_truth",
    "write_embeddings",
    "write_ground_truth",
]

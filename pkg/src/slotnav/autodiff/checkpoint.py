"""LZP1 parameter checkpoints.

Layout (all integers unsigned 32-bit little-endian)::

    b"LZP1" | count | count x (name_len | name (UTF-8) | rank | dims... | float64 LE values)
"""

from __future__ import annotations

import struct
from collections.abc import Mapping
from pathlib import Path

import numpy as np

from ..domain.errors import DataFormatError
from .tensor import Array

MAGIC = b"LZP1"
_U32 = struct.Struct("<I")


def dump_checkpoint(parameters: Mapping[str, Array]) -> bytes:
    """Serialise parameters in iteration order.

    Example:
        >>> blob = dump_checkpoint({"w": np.array([[1.0, 2.0]])})
        >>> blob[:4], len(blob)
        (b'LZP1', 41)
    """
    chunks = [MAGIC, _U32.pack(len(parameters))]
    for name, value in parameters.items():
        encoded = name.encode("utf-8")
        array = np.asarray(value, dtype="<f8")
        chunks.append(_U32.pack(len(encoded)))
        chunks.append(encoded)
        chunks.append(_U32.pack(array.ndim))
        chunks.extend(_U32.pack(dim) for dim in array.shape)
        chunks.append(np.ascontiguousarray(array).tobytes())
    return b"".join(chunks)


def parse_checkpoint(blob: bytes, *, source: str = "<bytes>") -> dict[str, Array]:
    """Inverse of :func:`dump_checkpoint`.

    Raises:
        DataFormatError: bad magic, a name that is not UTF-8, truncated data or trailing bytes.
    """
    if blob[:4] != MAGIC:
        raise DataFormatError("not an LZP1 checkpoint (bad magic)", path=source)
    offset = 4

    def read_u32() -> int:
        nonlocal offset
        if offset + 4 > len(blob):
            raise DataFormatError("truncated checkpoint", path=source)
        (value,) = _U32.unpack_from(blob, offset)
        offset += 4
        return int(value)

    parameters: dict[str, Array] = {}
    for _ in range(read_u32()):
        name_length = read_u32()
        if offset + name_length > len(blob):
            raise DataFormatError("truncated parameter name", path=source)
        try:
            name = blob[offset : offset + name_length].decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DataFormatError("parameter name is not UTF-8", path=source) from exc
        offset += name_length
        shape = tuple(read_u32() for _ in range(read_u32()))
        byte_count = int(np.prod(shape, dtype=np.int64)) * 8
        if offset + byte_count > len(blob):
            raise DataFormatError(f"truncated values for parameter {name!r}", path=source)
        values = np.frombuffer(blob, dtype="<f8", count=byte_count // 8, offset=offset)
        parameters[name] = values.astype(np.float64).reshape(shape)
        offset += byte_count
    if offset != len(blob):
        raise DataFormatError(f"{len(blob) - offset} trailing bytes after the last parameter", path=source)
    return parameters


def save_checkpoint(path: str | Path, parameters: Mapping[str, Array]) -> Path:
    target = Path(path)
    target.write_bytes(dump_checkpoint(parameters))
    return target


def load_checkpoint(path: str | Path) -> dict[str, Array]:
    source = Path(path)
    return parse_checkpoint(source.read_bytes(), source=str(source))


__all__ = ["MAGIC", "dump_checkpoint", "load_checkpoint", "parse_checkpoint", "save_checkpoint"]

"""Run manifests: what a training run consumed and produced.

The manifest holds no timestamps or host details, so two runs from the same
inputs write byte-identical manifests.
"""

from __future__ import annotations

import hashlib
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

import numpy as np
import orjson
from pydantic import BaseModel, ConfigDict

from ..objectives import LossReport
from ..promptgen import dump_record
from .config import TrainConfig
from .data import Example

MANIFEST_NAME = "manifest.json"
METRICS_NAME = "metrics.jsonl"
CHECKPOINT_NAME = "checkpoint.lzp"
OPTIMIZER = "gradient-descent"


def content_hash(data: bytes) -> str:
    """Git blob hash of ``data``.

    Example:
        >>> content_hash(b"")
        'e69de29bb2d1d6434b8b29ae775ad8c2e48c5391'
    """
    digest = hashlib.sha1(b"blob %d\x00" % len(data), usedforsecurity=False)
    digest.update(data)
    return digest.hexdigest()


def examples_hash(examples: Iterable[Example]) -> str:
    """Content hash over every record and its pixels, in order."""
    chunks: list[bytes] = []
    for example in examples:
        chunks.append(dump_record(example.record))
        chunks.append(np.ascontiguousarray(example.image, dtype="<f8").tobytes())
    return content_hash(b"\n".join(chunks))


class StepRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    step: int
    L_C: float  # noqa: N815
    L_L1: float  # noqa: N815
    L_GIoU: float  # noqa: N815
    L_MC: float  # noqa: N815
    total: float
    learning_rate: float
    grad_norm: float


class CheckpointRef(BaseModel):
    model_config = ConfigDict(frozen=True)

    path: str
    hash: str


class RunManifest(BaseModel):
    """Config snapshot, input hash, per-step losses and the final checkpoint.

    ``adam`` stays ``False``: only plain gradient descent is implemented.
    """

    model_config = ConfigDict(frozen=True)

    version: str
    config: dict[str, Any]
    inputs: str
    optimizer: str = OPTIMIZER
    adam: bool = False
    steps: tuple[StepRecord, ...] = ()
    checkpoint: CheckpointRef | None = None

    def train_config(self) -> TrainConfig:
        """Rebuild the :class:`TrainConfig` the run used."""
        return TrainConfig.model_validate(self.config)


def step_record(step: int, report: LossReport, learning_rate: float, grad_norm: float) -> StepRecord:
    return StepRecord.model_validate({**report.as_record(step), "learning_rate": learning_rate, "grad_norm": grad_norm})


def dump_manifest(manifest: RunManifest) -> bytes:
    return orjson.dumps(manifest.model_dump(mode="json"), option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS) + b"\n"


def write_manifest(path: str | Path, manifest: RunManifest) -> Path:
    target = Path(path)
    target.write_bytes(dump_manifest(manifest))
    return target


def read_manifest(path: str | Path) -> RunManifest:
    return RunManifest.model_validate(orjson.loads(Path(path).read_bytes()))


def write_metrics(path: str | Path, steps: Sequence[StepRecord]) -> Path:
    """One JSON line per step."""
    target = Path(path)
    with target.open("wb") as handle:
        for record in steps:
            handle.write(orjson.dumps(record.model_dump(mode="json")) + b"\n")
    return target


__all__ = [
    "CHECKPOINT_NAME",
    "MANIFEST_NAME",
    "METRICS_NAME",
    "OPTIMIZER",
    "CheckpointRef",
    "RunManifest",
    "StepRecord",
    "content_hash",
    "dump_manifest",
    "examples_hash",
    "read_manifest",
    "step_record",
    "write_manifest",
    "write_metrics",
]

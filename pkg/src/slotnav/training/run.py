"""Full training runs that leave a checkpoint, metrics and a manifest behind."""

from __future__ import annotations

import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from ..__init__conf__ import version
from ..autodiff import Array, dump_checkpoint
from ..model import init_parameters, split_trainable
from .config import TrainConfig
from .data import Example, make_batch
from .loop import train_step
from .manifest import (
    CHECKPOINT_NAME,
    MANIFEST_NAME,
    METRICS_NAME,
    CheckpointRef,
    RunManifest,
    StepRecord,
    content_hash,
    examples_hash,
    step_record,
    write_manifest,
    write_metrics,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True, eq=False)
class TrainingRun:
    parameters: dict[str, Array] = field(repr=False)
    manifest: RunManifest
    directory: Path

    @property
    def checkpoint_path(self) -> Path:
        return self.directory / CHECKPOINT_NAME

    @property
    def metrics_path(self) -> Path:
        return self.directory / METRICS_NAME

    @property
    def manifest_path(self) -> Path:
        return self.directory / MANIFEST_NAME


def train(
    examples: Sequence[Example],
    config: TrainConfig,
    output_dir: str | Path,
    *,
    parameters: Mapping[str, Array] | None = None,
) -> TrainingRun:
    """Run ``config.total_steps`` gradient steps and write the run artifacts.

    ``output_dir`` receives ``checkpoint.lzp``, ``metrics.jsonl`` and
    ``manifest.json``. The same examples and config always produce the same
    bytes in all three.

    Raises:
        ContractError: no examples.
        TrainingAbortedError: the loss became non-finite; nothing is written.
    """
    directory = Path(output_dir)
    current = dict(parameters) if parameters is not None else init_parameters(config.encoder)
    _, text_parameters = split_trainable(current)
    inputs = examples_hash(examples)
    logger.info(
        "training started",
        extra={"examples": len(examples), "steps": config.total_steps, "inputs": inputs},
    )

    steps: list[StepRecord] = []
    for step in range(config.total_steps):
        batch = make_batch(examples, step, config, text_parameters)
        result = train_step(current, batch, config, step)
        current = result.parameters
        steps.append(step_record(step, result.report, result.learning_rate, result.grad_norm))

    directory.mkdir(parents=True, exist_ok=True)
    blob = dump_checkpoint(current)
    (directory / CHECKPOINT_NAME).write_bytes(blob)
    write_metrics(directory / METRICS_NAME, steps)
    manifest = RunManifest(
        version=version,
        config=config.model_dump(mode="json"),
        inputs=inputs,
        steps=tuple(steps),
        checkpoint=CheckpointRef(path=CHECKPOINT_NAME, hash=content_hash(blob)),
    )
    write_manifest(directory / MANIFEST_NAME, manifest)
    logger.info("training finished", extra={"directory": str(directory), "final": steps[-1].total})
    return TrainingRun(parameters=current, manifest=manifest, directory=directory)


__all__ = ["TrainingRun", "train"]

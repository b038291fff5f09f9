"""Training: schedule, gradient steps, the overfit harness and run artifacts."""

from __future__ import annotations

from .config import TrainConfig, learning_rate_at
from .data import Example, annotation_set, batch_indices, desk_examples, load_examples, make_batch
from .loop import StepResult, clip_gradients, failing_component, global_norm, train_step
from .manifest import (
    CHECKPOINT_NAME,
    MANIFEST_NAME,
    METRICS_NAME,
    RunManifest,
    StepRecord,
    content_hash,
    examples_hash,
    read_manifest,
    write_manifest,
)
from .overfit import CONVERGED_FRACTION, ConvergenceReport, overfit_harness, training_set_retrieval
from .run import TrainingRun, train

__all__ = [
    "CHECKPOINT_NAME",
    "CONVERGED_FRACTION",
    "MANIFEST_NAME",
    "METRICS_NAME",
    "ConvergenceReport",
    "Example",
    "RunManifest",
    "StepRecord",
    "StepResult",
    "TrainConfig",
    "TrainingRun",
    "annotation_set",
    "batch_indices",
    "clip_gradients",
    "content_hash",
    "desk_examples",
    "examples_hash",
    "failing_component",
    "global_norm",
    "learning_rate_at",
    "load_examples",
    "make_batch",
    "overfit_harness",
    "read_manifest",
    "train",
    "train_step",
    "training_set_retrieval",
    "write_manifest",
]

"""One optimisation step: gradients of the total loss, clipping, descent."""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from ..autodiff import Array, gradient
from ..domain.errors import NonFiniteError, TrainingAbortedError
from ..model import split_trainable
from ..objectives import LossBatch, LossReport, loss_graph, report_from
from .config import TrainConfig, learning_rate_at

logger = logging.getLogger(__name__)

_COMPONENT_OF_SCOPE = {"contrastive": "L_C", "l1": "L_L1", "giou": "L_GIoU", "multilabel": "L_MC"}


@dataclass(frozen=True, slots=True)
class StepResult:
    """Updated parameters and what the step measured before updating."""

    parameters: dict[str, Array]
    report: LossReport
    learning_rate: float
    grad_norm: float


def failing_component(node: str | None) -> str:
    """Loss component owning the node name ``node`` (``encoder`` when none does).

    Example:
        >>> failing_component("multilabel/log_softmax"), failing_component("image.block0/gelu")
        ('L_MC', 'encoder')
    """
    for part in (node or "").split("/"):
        if part in _COMPONENT_OF_SCOPE:
            return _COMPONENT_OF_SCOPE[part]
    return "encoder"


def global_norm(gradients: Mapping[str, Array]) -> float:
    return math.sqrt(sum(float(np.sum(grad * grad)) for grad in gradients.values()))


def clip_gradients(gradients: Mapping[str, Array], max_norm: float | None) -> tuple[dict[str, Array], float]:
    """Scale all gradients together so their global norm is at most ``max_norm``.

    Example:
        >>> clipped, norm = clip_gradients({"w": np.array([3.0, 4.0])}, 1.0)
        >>> norm, clipped["w"].tolist()
        (5.0, [0.6, 0.8])
    """
    norm = global_norm(gradients)
    if max_norm is None or norm <= max_norm:
        return dict(gradients), norm
    scale = max_norm / norm
    return {name: grad * scale for name, grad in gradients.items()}, norm


def train_step(
    parameters: Mapping[str, Array], batch: LossBatch, config: TrainConfig, step: int = 0
) -> StepResult:
    """Gradient-descent update of every image-side parameter on ``batch``.

    Text-encoder parameters are passed through untouched. A learning rate of
    zero returns bit-identical parameters.

    Raises:
        TrainingAbortedError: a loss component (or the encoder feeding it)
            became non-finite; ``component`` names it.
    """
    trainable, frozen = split_trainable(parameters)
    graph = loss_graph(
        batch, trainable, config.encoder, config.weights, slot_seed=config.seed, match_cost=config.match_cost
    )
    try:
        report = gradient(graph, "total")
    except NonFiniteError as exc:
        raise TrainingAbortedError(failing_component(exc.node), math.nan) from exc
    matched = sum(min(config.encoder.num_slots, len(annotations)) for annotations in batch.annotations)
    losses = report_from(report.outputs, matched)

    rate = learning_rate_at(step, config)
    gradients, norm = clip_gradients(report.gradients, config.max_grad_norm)
    if rate == 0.0:
        updated = dict(trainable)
    else:
        updated = {name: value - rate * gradients[name] for name, value in trainable.items()}
    logger.debug("train step", extra={"step": step, "total": losses.total, "lr": rate, "grad_norm": norm})
    return StepResult(parameters={**updated, **frozen}, report=losses, learning_rate=rate, grad_norm=norm)


__all__ = ["StepResult", "clip_gradients", "failing_component", "global_norm", "train_step"]

"""Overfit a tiny multi-label set to prove the objective converges."""

from __future__ import annotations

import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

from ..autodiff import Array
from ..domain.errors import ContractError
from ..model import embed_images, init_parameters, split_trainable
from ..objectives import LossBatch, LossReport, LossWeights, total_loss
from ..retrieval import GroundTruth, RetrievalEvaluation, build_index, evaluate_retrieval
from .config import TrainConfig
from .data import Example, make_batch
from .loop import train_step

logger = logging.getLogger(__name__)

#: fraction of the initial loss that counts as converged
CONVERGED_FRACTION = 0.1


@dataclass(frozen=True, slots=True, eq=False)
class ConvergenceReport:
    """Loss curve and training-set retrieval of an overfit run.

    Attributes:
        losses: per-step reports, measured before each update.
        initial: total loss at step 0.
        final: total loss after the last update.
        converged: ``final`` fell to :data:`CONVERGED_FRACTION` of ``initial``.
        steps: updates performed.
        retrieval: AR@1 both ways on the trained embeddings.
        final_full_loss: final loss with every weight set to one.
        parameters: trained parameters.
    """

    losses: tuple[LossReport, ...]
    initial: float
    final: float
    converged: bool
    steps: int
    retrieval: RetrievalEvaluation
    final_full_loss: float
    parameters: dict[str, Array] = field(repr=False)

    @property
    def ar1(self) -> float:
        """Text-to-image AR@1 over the training captions."""
        return self.retrieval.text_to_image.at(1)

    def as_record(self) -> dict[str, float | int | bool]:
        return {
            "steps": self.steps,
            "initial": self.initial,
            "final": self.final,
            "converged": self.converged,
            "final_full_loss": self.final_full_loss,
            **self.retrieval.as_record(),
        }


def training_set_retrieval(
    batch: LossBatch, parameters: Mapping[str, Array], config: TrainConfig
) -> RetrievalEvaluation:
    """AR@1 of each image's caption against the batch images, and the reverse."""
    image_ids = [f"img{index}" for index in range(batch.size)]
    caption_ids = [f"cap{index}" for index in range(batch.size)]
    images = build_index(embed_images(batch.images, parameters, config.encoder, seed=config.seed), image_ids)
    texts = build_index(batch.caption_embeddings, caption_ids)
    truth = GroundTruth.from_pairs(zip(caption_ids, image_ids, strict=True))
    return evaluate_retrieval(texts, images, truth, k=1)


def overfit_harness(
    examples: Sequence[Example],
    config: TrainConfig,
    *,
    steps: int | None = None,
    parameters: Mapping[str, Array] | None = None,
) -> ConvergenceReport:
    """Train on one fixed batch holding every example.

    Stops once the total loss is at most :data:`CONVERGED_FRACTION` of its
    initial value or after ``steps`` updates (default ``config.total_steps``).
    An exhausted budget is reported with ``converged=False`` and the full
    loss curve, not raised.

    Raises:
        ContractError: no examples, or an example without annotations.
        TrainingAbortedError: the loss became non-finite.
    """
    if not examples:
        raise ContractError("overfit harness needs at least one example")
    budget = config.total_steps if steps is None else steps
    if budget < 1:
        raise ContractError(f"step budget must be >= 1, got {budget}")
    current = dict(parameters) if parameters is not None else init_parameters(config.encoder)
    _, text_parameters = split_trainable(current)
    batch = make_batch(examples, 0, config, text_parameters, indices=range(len(examples)))

    losses: list[LossReport] = []
    converged = False
    for step in range(budget):
        result = train_step(current, batch, config, step)
        losses.append(result.report)
        current = result.parameters
        if result.report.total <= CONVERGED_FRACTION * losses[0].total:
            converged = True
            break

    def evaluate(weights: LossWeights) -> float:
        report = total_loss(
            batch, current, config.encoder, weights, slot_seed=config.seed, match_cost=config.match_cost
        )
        return report.total

    initial = losses[0].total
    final = evaluate(config.weights)
    converged = converged or final <= CONVERGED_FRACTION * initial
    full = evaluate(LossWeights(temperature=config.weights.temperature))
    retrieval = training_set_retrieval(batch, current, config)
    if not converged:
        logger.warning(
            "overfit budget exhausted",
            extra={"steps": len(losses), "initial": initial, "final": final},
        )
    logger.info("overfit finished", extra={"steps": len(losses), "final": final, **retrieval.as_record()})
    return ConvergenceReport(
        losses=tuple(losses),
        initial=initial,
        final=final,
        converged=converged,
        steps=len(losses),
        retrieval=retrieval,
        final_full_loss=full,
        parameters=current,
    )


__all__ = ["CONVERGED_FRACTION", "ConvergenceReport", "overfit_harness", "training_set_retrieval"]

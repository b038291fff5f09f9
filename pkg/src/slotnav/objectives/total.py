"""Weighted training objective over a batch of annotated images."""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field

from ..autodiff import Array, Graph, Tensor, ops, record_branch, scope
from ..autodiff.tensor import reshape
from ..domain.enums import MatchCost
from ..domain.errors import ContractError
from ..model import EncoderConfig, constants, encode_texts, forward
from ..model.layers import Params
from .boxes import Box, giou_tensor, l1_tensor, validate_boxes
from .contrastive import concat_captions, contrastive_loss, multilabel_contrastive_loss
from .matching import Assignment, hungarian, pairwise_cost

COMPONENTS = ("l_c", "l_l1", "l_giou", "l_mc")


@dataclass(frozen=True, slots=True, eq=False)
class AnnotationSet:
    """Caption and box of every annotated object in one image.

    Example:
        >>> ann = AnnotationSet.from_pairs([("sofa", (0.1, 0.1, 0.5, 0.6))])
        >>> len(ann), ann.captions
        (1, ('sofa',))
    """

    captions: tuple[str, ...]
    boxes: Array = field(repr=False)

    def __post_init__(self) -> None:
        boxes = validate_boxes(self.boxes, unit=True)
        if not self.captions:
            raise ContractError("an image needs at least one annotation")
        if len(self.captions) != len(boxes):
            raise ContractError(f"{len(self.captions)} captions for {len(boxes)} boxes")
        if any(not caption.strip() for caption in self.captions):
            raise ContractError("annotation captions must be non-empty")
        boxes.setflags(write=False)
        object.__setattr__(self, "boxes", boxes)

    def __len__(self) -> int:
        return len(self.captions)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, Box]]) -> AnnotationSet:
        items = list(pairs)
        return cls(tuple(caption for caption, _ in items), np.array([box for _, box in items], dtype=np.float64))


class LossWeights(BaseModel):
    """Weights of the four loss components and the softmax temperature.

    Example:
        >>> LossWeights().model_dump()
        {'alpha': 1.0, 'beta': 1.0, 'gamma': 1.0, 'delta': 1.0, 'temperature': 0.07}
    """

    model_config = ConfigDict(frozen=True, extra="ignore")

    #: contrastive image-caption loss
    alpha: float = Field(default=1.0, ge=0.0)
    #: L1 box regression
    beta: float = Field(default=1.0, ge=0.0)
    #: 1 - GIoU box loss
    gamma: float = Field(default=1.0, ge=0.0)
    #: multi-label slot-caption loss
    delta: float = Field(default=1.0, ge=0.0)
    temperature: float = Field(default=0.07, gt=0.0)


@dataclass(frozen=True, slots=True)
class LossReport:
    """Loss components and their weighted total."""

    l_c: float
    l_l1: float
    l_giou: float
    l_mc: float
    total: float
    matched: int = 0

    def as_record(self, step: int) -> dict[str, float | int]:
        """Line-delimited metrics record for ``step``."""
        return {
            "step": step,
            "L_C": self.l_c,
            "L_L1": self.l_l1,
            "L_GIoU": self.l_giou,
            "L_MC": self.l_mc,
            "total": self.total,
        }


@dataclass(frozen=True, slots=True, eq=False)
class LossBatch:
    """Images with annotations and their precomputed (frozen) text embeddings.

    Attributes:
        images: ``(B, H, W, 3)`` pixels.
        annotations: one :class:`AnnotationSet` per image.
        captions: per image, the concatenated caption text.
        caption_embeddings: ``(B, D)`` embeddings of ``captions``.
        annotation_embeddings: per image, ``(N_b, D)`` caption embeddings.
    """

    images: Array
    annotations: tuple[AnnotationSet, ...]
    captions: tuple[str, ...]
    caption_embeddings: Array
    annotation_embeddings: tuple[Array, ...]

    @property
    def size(self) -> int:
        return len(self.annotations)


def caption_seed(seed: int, index: int) -> int:
    """Independent seed for the caption permutation of batch item ``index``."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def prepare_batch(
    images: ArrayLike,
    annotations: Sequence[AnnotationSet],
    text_parameters: Mapping[str, Array],
    config: EncoderConfig,
    *,
    seed: int = 0,
) -> LossBatch:
    """Concatenate captions and encode every text with the frozen text encoder."""
    pixels = np.asarray(images, dtype=np.float64)
    if pixels.ndim != 4 or pixels.shape[0] != len(annotations):  # noqa: PLR2004
        raise ContractError(f"need (B, H, W, 3) images matching {len(annotations)} annotation sets, got {pixels.shape}")
    if not annotations:
        raise ContractError("a loss batch needs at least one image")
    text_params = constants(text_parameters)
    captions = tuple(concat_captions(ann.captions, caption_seed(seed, index)) for index, ann in enumerate(annotations))
    return LossBatch(
        images=pixels,
        annotations=tuple(annotations),
        captions=captions,
        caption_embeddings=encode_texts(captions, text_params, config),
        annotation_embeddings=tuple(encode_texts(ann.captions, text_params, config) for ann in annotations),
    )


@dataclass(frozen=True, slots=True)
class LossTerms:
    """Scalar tensors of every component plus the matchings used."""

    components: dict[str, Tensor]
    total: Tensor
    assignments: tuple[Assignment, ...]

    @property
    def matched(self) -> int:
        return sum(len(assignment.pairs) for assignment in self.assignments)


def loss_terms(
    batch: LossBatch,
    params: Params,
    config: EncoderConfig,
    weights: LossWeights,
    *,
    slot_seed: int | None = None,
    match_cost: MatchCost = MatchCost.ONE_MINUS_GIOU,
) -> LossTerms:
    """Run the encoder, match boxes per image and build all four losses."""
    output = forward(batch.images, params, config, seed=slot_seed)
    l_c = contrastive_loss(output.embedding, batch.caption_embeddings, weights.temperature)

    boxes = output.boxes.boxes
    predicted = boxes.data
    assignments = tuple(
        hungarian(pairwise_cost(predicted[index], ann.boxes, match_cost)) for index, ann in enumerate(batch.annotations)
    )
    for assignment in assignments:
        record_branch("hungarian", assignment.as_array())

    count = config.num_slots
    rows = [index * count + slot for index, a in enumerate(assignments) for slot, _ in a.pairs]
    targets = np.array(
        [batch.annotations[index].boxes[ann] for index, a in enumerate(assignments) for _, ann in a.pairs]
    ).reshape(-1, 4)
    with scope("boxes"):
        if rows:
            flat = reshape(boxes, (boxes.shape[0] * count, 4))
            matched = ops.take(flat, rows, axis=0)
            with scope("l1"):
                l_l1 = l1_tensor(matched, Tensor(targets)).mean()
            with scope("giou"):
                l_giou = (1.0 - giou_tensor(matched, Tensor(targets))).mean()
        else:
            l_l1 = Tensor(0.0)
            l_giou = Tensor(0.0)

    l_mc = multilabel_contrastive_loss(
        output.state.slots,
        batch.annotation_embeddings,
        assignments,
        params,
        weights.temperature,
        texts=[ann.captions for ann in batch.annotations],
    ).loss

    components = {"l_c": l_c, "l_l1": l_l1, "l_giou": l_giou, "l_mc": l_mc}
    total = l_c * weights.alpha + l_l1 * weights.beta + l_giou * weights.gamma + l_mc * weights.delta
    return LossTerms(components=components, total=total, assignments=assignments)


def loss_graph(
    batch: LossBatch,
    parameters: Mapping[str, Array],
    config: EncoderConfig,
    weights: LossWeights,
    *,
    slot_seed: int | None = None,
    match_cost: MatchCost = MatchCost.ONE_MINUS_GIOU,
) -> Graph:
    """Graph over the trainable ``parameters`` with outputs ``total`` and each component."""

    def build(params: Mapping[str, Tensor], _: Mapping[str, Any]) -> dict[str, Tensor]:
        terms = loss_terms(batch, params, config, weights, slot_seed=slot_seed, match_cost=match_cost)
        return {"total": terms.total, **terms.components}

    return Graph(build=build, parameters=dict(parameters))


def report_from(outputs: Mapping[str, Tensor], matched: int = 0) -> LossReport:
    return LossReport(
        l_c=outputs["l_c"].item(),
        l_l1=outputs["l_l1"].item(),
        l_giou=outputs["l_giou"].item(),
        l_mc=outputs["l_mc"].item(),
        total=outputs["total"].item(),
        matched=matched,
    )


def total_loss(
    batch: LossBatch,
    parameters: Mapping[str, Array],
    config: EncoderConfig,
    weights: LossWeights,
    *,
    slot_seed: int | None = None,
    match_cost: MatchCost = MatchCost.ONE_MINUS_GIOU,
) -> LossReport:
    """Evaluate the weighted objective without gradients."""
    terms = loss_terms(batch, constants(parameters), config, weights, slot_seed=slot_seed, match_cost=match_cost)
    return report_from({"total": terms.total, **terms.components}, terms.matched)


__all__ = [
    "COMPONENTS",
    "AnnotationSet",
    "LossBatch",
    "LossReport",
    "LossTerms",
    "LossWeights",
    "caption_seed",
    "loss_graph",
    "loss_terms",
    "prepare_batch",
    "report_from",
    "total_loss",
]

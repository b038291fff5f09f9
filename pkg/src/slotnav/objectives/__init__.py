"""Training objectives: box matching, box losses and contrastive terms."""

from __future__ import annotations

from .boxes import AREA_FLOOR, Box, giou, giou_tensor, iou, l1_box, l1_tensor, validate_boxes
from .contrastive import (
    CAPTION_SEPARATOR,
    MultiLabelResult,
    concat_captions,
    contrastive_loss,
    multilabel_contrastive_loss,
)
from .matching import TIE_TOLERANCE, Assignment, brute_force_assignment, hungarian, pairwise_cost
from .total import (
    COMPONENTS,
    AnnotationSet,
    LossBatch,
    LossReport,
    LossTerms,
    LossWeights,
    caption_seed,
    loss_graph,
    loss_terms,
    prepare_batch,
    report_from,
    total_loss,
)

__all__ = [
    "AREA_FLOOR",
    "CAPTION_SEPARATOR",
    "COMPONENTS",
    "TIE_TOLERANCE",
    "AnnotationSet",
    "Assignment",
    "Box",
    "LossBatch",
    "LossReport",
    "LossTerms",
    "LossWeights",
    "MultiLabelResult",
    "brute_force_assignment",
    "caption_seed",
    "concat_captions",
    "contrastive_loss",
    "giou",
    "giou_tensor",
    "hungarian",
    "iou",
    "l1_box",
    "l1_tensor",
    "loss_graph",
    "loss_terms",
    "multilabel_contrastive_loss",
    "pairwise_cost",
    "prepare_batch",
    "report_from",
    "total_loss",
    "validate_boxes",
]

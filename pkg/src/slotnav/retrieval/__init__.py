"""Zero-shot text-image retrieval over an embedding memory and its evaluation."""

from __future__ import annotations

from .index import NORM_TOLERANCE, EmbeddingIndex, build_index, similarity, topk, topk_images, topk_texts
from .recall import GroundTruth, RecallReport, RetrievalEvaluation, average_recall, evaluate_retrieval, rank_all
from .storage import (
    dump_embeddings,
    parse_embeddings,
    parse_ground_truth,
    read_embeddings,
    read_ground_truth,
    write_embeddings,
    write_ground_truth,
)

__all__ = [
    "NORM_TOLERANCE",
    "EmbeddingIndex",
    "GroundTruth",
    "RecallReport",
    "RetrievalEvaluation",
    "average_recall",
    "build_index",
    "dump_embeddings",
    "evaluate_retrieval",
    "parse_embeddings",
    "parse_ground_truth",
    "rank_all",
    "read_embeddings",
    "read_ground_truth",
    "similarity",
    "topk",
    "topk_images",
    "topk_texts",
    "write_embeddings",
    "write_ground_truth",
]

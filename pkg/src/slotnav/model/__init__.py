"""Object-centric image encoder and frozen text encoder at desk scale."""

from __future__ import annotations

from .config import EncoderConfig
from .encoder import EncoderOutput, embed_images, forward
from .heads import BoxSet, aggregate_embedding, boxes_from_unit, predict_boxes, project_slots
from .image import PatchFeatures, encode_image, encode_images, patchify, read_ppm, write_ppm
from .layers import Params
from .params import TEXT_PREFIX, constants, init_parameters, split_trainable
from .slots import SlotState, initial_slots, permute_slots, run_slot_attention, slot_attention_step
from .text import encode_text, encode_text_tensor, encode_texts, tokenize

__all__ = [
    "TEXT_PREFIX",
    "BoxSet",
    "EncoderConfig",
    "EncoderOutput",
    "Params",
    "PatchFeatures",
    "SlotState",
    "aggregate_embedding",
    "boxes_from_unit",
    "constants",
    "embed_images",
    "encode_image",
    "encode_images",
    "encode_text",
    "encode_text_tensor",
    "encode_texts",
    "forward",
    "init_parameters",
    "initial_slots",
    "patchify",
    "permute_slots",
    "predict_boxes",
    "project_slots",
    "read_ppm",
    "run_slot_attention",
    "slot_attention_step",
    "split_trainable",
    "tokenize",
    "write_ppm",
]

"""Full image forward pass: tokens, slots, boxes and embedding in one call."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass

from numpy.typing import ArrayLike

from ..autodiff import Array, Tensor
from .config import EncoderConfig
from .heads import BoxSet, aggregate_embedding, predict_boxes
from .image import PatchFeatures, encode_images
from .layers import Params
from .params import constants
from .slots import SlotState, run_slot_attention


@dataclass(frozen=True, slots=True)
class EncoderOutput:
    features: PatchFeatures
    state: SlotState
    boxes: BoxSet
    #: ``(B, D)`` unit-norm image embeddings
    embedding: Tensor


def forward(images: ArrayLike, params: Params, config: EncoderConfig, *, seed: int | None = None) -> EncoderOutput:
    """Run the image encoder on a ``(B, H, W, 3)`` batch."""
    features = encode_images(images, params, config)
    state = run_slot_attention(features, params, config, seed=seed)
    return EncoderOutput(
        features=features,
        state=state,
        boxes=predict_boxes(state, params),
        embedding=aggregate_embedding(features, state, params),
    )


def embed_images(
    images: ArrayLike, parameters: Mapping[str, Array], config: EncoderConfig, *, seed: int | None = None
) -> Array:
    """Inference helper: ``(B, D)`` embeddings as a plain array."""
    output = forward(images, constants(parameters), config, seed=seed)
    return output.embedding.numpy()


__all__ = ["EncoderOutput", "embed_images", "forward"]

"""Parameter naming and seeded initialisation.

Names are dotted paths. Image-side parameters live under ``image.``,
``slot.``, ``box.`` and ``agg.``; the frozen text encoder lives under
``text.``.
"""

from __future__ import annotations

from collections.abc import Iterator, Mapping

import numpy as np

from ..autodiff import Array, Tensor
from .config import EncoderConfig

TEXT_PREFIX = "text."

#: Std-dev of positional tables.
_POSITION_SCALE = 0.02


def _linear(rng: np.random.Generator, fan_in: int, fan_out: int) -> Array:
    return rng.standard_normal((fan_in, fan_out)) / np.sqrt(fan_in)


def _block(rng: np.random.Generator, prefix: str, dim: int, hidden: int) -> Iterator[tuple[str, Array]]:
    yield f"{prefix}.ln1.gain", np.ones(dim)
    yield f"{prefix}.ln1.bias", np.zeros(dim)
    for proj in ("wq", "wk", "wv", "wo"):
        yield f"{prefix}.attn.{proj}", _linear(rng, dim, dim)
    yield f"{prefix}.ln2.gain", np.ones(dim)
    yield f"{prefix}.ln2.bias", np.zeros(dim)
    yield f"{prefix}.mlp.w1", _linear(rng, dim, hidden)
    yield f"{prefix}.mlp.b1", np.zeros(hidden)
    yield f"{prefix}.mlp.w2", _linear(rng, hidden, dim)
    yield f"{prefix}.mlp.b2", np.zeros(dim)


def _image_parameters(rng: np.random.Generator, config: EncoderConfig) -> Iterator[tuple[str, Array]]:
    dim, slot_dim, hidden = config.dim, config.slot_dim, config.dim * config.mlp_ratio
    yield "image.patch.weight", _linear(rng, config.patch_dim, dim)
    yield "image.patch.bias", np.zeros(dim)
    yield "image.pos", _POSITION_SCALE * rng.standard_normal((config.num_patches, dim))
    for index in range(config.depth):
        yield from _block(rng, f"image.block{index}", dim, hidden)
    yield "image.ln.gain", np.ones(dim)
    yield "image.ln.bias", np.zeros(dim)

    yield "slot.wq", _linear(rng, slot_dim, slot_dim)
    yield "slot.wk", _linear(rng, dim, slot_dim)
    yield "slot.wv", _linear(rng, dim, slot_dim)
    for gate in ("r", "z", "n"):
        yield f"slot.gru.wx_{gate}", _linear(rng, slot_dim, slot_dim)
        yield f"slot.gru.wh_{gate}", _linear(rng, slot_dim, slot_dim)
        yield f"slot.gru.b_{gate}", np.zeros(slot_dim)
    yield "slot.gru.bh_n", np.zeros(slot_dim)
    yield "slot.ln.gain", np.ones(slot_dim)
    yield "slot.ln.bias", np.zeros(slot_dim)
    yield "slot.mlp.w1", _linear(rng, slot_dim, slot_dim)
    yield "slot.mlp.b1", np.zeros(slot_dim)
    yield "slot.mlp.w2", _linear(rng, slot_dim, slot_dim)
    yield "slot.mlp.b2", np.zeros(slot_dim)

    yield "box.w1", _linear(rng, slot_dim, slot_dim)
    yield "box.b1", np.zeros(slot_dim)
    yield "box.w2", _linear(rng, slot_dim, slot_dim)
    yield "box.b2", np.zeros(slot_dim)
    yield "box.w3", _linear(rng, slot_dim, 4)
    yield "box.b3", np.zeros(4)

    yield "agg.slot.weight", _linear(rng, config.num_slots * slot_dim, dim)
    yield "agg.slot.bias", np.zeros(dim)
    yield "agg.w1", _linear(rng, 2 * dim, dim)
    yield "agg.b1", np.zeros(dim)
    yield "agg.w2", _linear(rng, dim, dim)
    yield "agg.b2", np.zeros(dim)


def _text_parameters(rng: np.random.Generator, config: EncoderConfig) -> Iterator[tuple[str, Array]]:
    dim = config.dim
    yield "text.embed", rng.standard_normal((config.text_vocab, dim))
    yield "text.pos", _POSITION_SCALE * rng.standard_normal((config.text_max_tokens, dim))
    for index in range(config.text_depth):
        yield from _block(rng, f"text.block{index}", dim, dim * config.mlp_ratio)
    yield "text.ln.gain", np.ones(dim)
    yield "text.ln.bias", np.zeros(dim)
    yield "text.proj.weight", _linear(rng, dim, dim)
    yield "text.proj.bias", np.zeros(dim)


def init_parameters(config: EncoderConfig) -> dict[str, Array]:
    """Draw every encoder parameter from ``default_rng(config.seed)``.

    Weights are normal with variance ``1 / fan_in``; gains are one and biases
    zero. Image and text parameters use independent streams so changing the
    image architecture never changes the frozen text encoder.

    Example:
        >>> params = init_parameters(EncoderConfig())
        >>> params["image.patch.weight"].shape, params["agg.slot.weight"].shape
        ((192, 32), (128, 32))
        >>> sorted({name.split(".")[0] for name in params})
        ['agg', 'box', 'image', 'slot', 'text']
    """
    image_rng, text_rng = (np.random.default_rng(seq) for seq in np.random.SeedSequence(config.seed).spawn(2))
    parameters = dict(_image_parameters(image_rng, config))
    parameters.update(_text_parameters(text_rng, config))
    return parameters


def split_trainable(parameters: Mapping[str, Array]) -> tuple[dict[str, Array], dict[str, Array]]:
    """Split into ``(trainable image-side, frozen text)`` parameters."""
    frozen = {name: value for name, value in parameters.items() if name.startswith(TEXT_PREFIX)}
    trainable = {name: value for name, value in parameters.items() if not name.startswith(TEXT_PREFIX)}
    return trainable, frozen


def constants(parameters: Mapping[str, Array]) -> dict[str, Tensor]:
    """Wrap arrays as non-tracking tensors for inference."""
    return {name: Tensor(value, name=name) for name, value in parameters.items()}


__all__ = ["TEXT_PREFIX", "constants", "init_parameters", "split_trainable"]

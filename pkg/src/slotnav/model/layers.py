"""Shared building blocks: affine layer norm, MLPs and pre-norm transformer blocks.

All helpers accept any number of leading batch axes; weights are looked up by
dotted name in a parameter mapping.
"""

from __future__ import annotations

from collections.abc import Mapping

import numpy as np

from ..autodiff import Tensor, ops, scope
from ..autodiff.tensor import reshape, transpose

Params = Mapping[str, Tensor]


def swap_last(value: Tensor) -> Tensor:
    """Transpose the last two axes."""
    axes = list(range(value.ndim))
    axes[-1], axes[-2] = axes[-2], axes[-1]
    return transpose(value, axes)


def affine_norm(value: Tensor, params: Params, prefix: str) -> Tensor:
    """Layer normalisation followed by ``gain`` and ``bias``."""
    with scope(prefix):
        return ops.layer_norm(value) * params[f"{prefix}.gain"] + params[f"{prefix}.bias"]


def dense(value: Tensor, weight: Tensor, bias: Tensor | None = None) -> Tensor:
    """``value @ weight + bias``; a vector input gives a vector output."""
    if value.ndim == 1:
        out = reshape(reshape(value, (1, value.shape[0])) @ weight, (weight.shape[-1],))
    else:
        out = value @ weight
    return out if bias is None else out + bias


def attention(value: Tensor, params: Params, prefix: str, heads: int) -> Tensor:
    """Multi-head self-attention over the second-to-last axis."""
    *lead, count, width = value.shape
    head_dim = width // heads
    rank = len(lead)
    split_axes = (*range(rank), rank + 1, rank, rank + 2)

    def split(proj: str) -> Tensor:
        projected = value @ params[f"{prefix}.{proj}"]
        return transpose(reshape(projected, (*lead, count, heads, head_dim)), split_axes)

    with scope(prefix):
        q, k, v = split("wq"), split("wk"), split("wv")
        weights = ops.softmax((q @ swap_last(k)) * (1.0 / np.sqrt(head_dim)), axis=-1)
        merged = reshape(transpose(weights @ v, split_axes), (*lead, count, width))
        return merged @ params[f"{prefix}.wo"]


def mlp(value: Tensor, params: Params, prefix: str) -> Tensor:
    """Two-layer GELU MLP using ``{prefix}.w1/b1/w2/b2``."""
    with scope(prefix):
        hidden = ops.gelu(dense(value, params[f"{prefix}.w1"], params[f"{prefix}.b1"]))
        return dense(hidden, params[f"{prefix}.w2"], params[f"{prefix}.b2"])


def transformer_block(value: Tensor, params: Params, prefix: str, heads: int) -> Tensor:
    """Pre-norm block: ``x + attn(LN(x))`` then ``h + MLP(LN(h))``."""
    hidden = value + attention(affine_norm(value, params, f"{prefix}.ln1"), params, f"{prefix}.attn", heads)
    return hidden + mlp(affine_norm(hidden, params, f"{prefix}.ln2"), params, f"{prefix}.mlp")


__all__ = ["Params", "affine_norm", "attention", "dense", "mlp", "swap_last", "transformer_block"]

"""Iterative slot attention over patch tokens.

One step, for tokens ``h`` (N x D) and slots ``S`` (K x D_s)::

    A = softmax_K(k(h) q(S)^T / sqrt(D_s))        attention, rows sum to 1
    W = A / sum_N(A)                               weights, columns sum to 1
    S' = S + MLP(LN(GRU(W^T v(h), S)))

The GRU and MLP are shared by all slots, so permuting the input slots
permutes the output identically.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, replace

import numpy as np
from numpy.typing import ArrayLike

from ..autodiff import Array, Tensor, ops, scope
from ..domain.errors import ContractError
from .config import EncoderConfig
from .image import PatchFeatures
from .layers import Params, affine_norm, mlp, swap_last


@dataclass(frozen=True, slots=True)
class SlotState:
    """Slots after ``iteration`` updates plus the traces of the last update.

    Attributes:
        slots: ``(K, D_s)`` or ``(B, K, D_s)``.
        attention: ``(N, K)`` or ``(B, N, K)``; ``None`` before the first update.
        weights: column-normalised attention, same shape as ``attention``.
        iteration: number of updates applied.
    """

    slots: Tensor
    attention: Tensor | None = None
    weights: Tensor | None = None
    iteration: int = 0


def initial_slots(config: EncoderConfig, seed: int | None = None) -> Array:
    """Draw ``K x D_s`` slots from ``N(mu, diag(sigma))``.

    Example:
        >>> cfg = EncoderConfig()
        >>> bool((initial_slots(cfg, 7) == initial_slots(cfg, 7)).all())
        True
    """
    rng = np.random.default_rng(config.seed if seed is None else seed)
    sigma = np.asarray(config.slot_sigma, dtype=np.float64)
    return config.slot_mu + sigma * rng.standard_normal((config.num_slots, config.slot_dim))


def _gru(inputs: Tensor, hidden: Tensor, params: Params) -> Tensor:
    def gate(name: str) -> Tensor:
        return inputs @ params[f"slot.gru.wx_{name}"] + params[f"slot.gru.b_{name}"]

    with scope("gru"):
        reset = ops.sigmoid(gate("r") + hidden @ params["slot.gru.wh_r"])
        update = ops.sigmoid(gate("z") + hidden @ params["slot.gru.wh_z"])
        candidate = ops.tanh(gate("n") + reset * (hidden @ params["slot.gru.wh_n"] + params["slot.gru.bh_n"]))
        return (1.0 - update) * candidate + update * hidden


def slot_attention_step(state: SlotState, feats: PatchFeatures, params: Params) -> SlotState:
    """Apply one slot update.

    Raises:
        ContractError: slot or token widths do not match the parameters, or
            batched slots meet unbatched tokens.
    """
    slots, tokens = state.slots, feats.tokens
    slot_dim = params["slot.wq"].shape[0]
    if slots.ndim != tokens.ndim or slots.shape[-1] != slot_dim or tokens.shape[-1] != params["slot.wk"].shape[0]:
        raise ContractError(
            f"slot_attention_step: slots {slots.shape} and tokens {tokens.shape} do not fit "
            f"D_s={slot_dim}, D={params['slot.wk'].shape[0]}"
        )
    if slots.shape[:-2] != tokens.shape[:-2]:
        raise ContractError(f"slot_attention_step: batch axes differ, {slots.shape} vs {tokens.shape}")
    with scope(f"slot.step{state.iteration + 1}"):
        keys = tokens @ params["slot.wk"]
        values = tokens @ params["slot.wv"]
        queries = slots @ params["slot.wq"]
        logits = (keys @ swap_last(queries)) * (1.0 / np.sqrt(slot_dim))
        attention = ops.softmax(logits, axis=-1)
        weights = ops.normalize_sum(attention, axis=-2)
        updates = swap_last(weights) @ values
        recurrent = _gru(updates, slots, params)
        new_slots = slots + mlp(affine_norm(recurrent, params, "slot.ln"), params, "slot.mlp")
    return SlotState(slots=new_slots, attention=attention, weights=weights, iteration=state.iteration + 1)


def run_slot_attention(
    feats: PatchFeatures,
    params: Params,
    config: EncoderConfig,
    *,
    seed: int | None = None,
    init: ArrayLike | None = None,
    on_step: Callable[[SlotState], None] | None = None,
) -> SlotState:
    """Initialise slots and apply ``config.slot_iters`` updates.

    Args:
        feats: patch features, single or batched.
        params: encoder parameters.
        config: supplies ``K``, ``D_s``, ``U``, ``mu``, ``sigma`` and the default seed.
        seed: overrides ``config.seed`` for this call.
        init: explicit ``K x D_s`` initial slots instead of a random draw.
        on_step: called with the state after every update.
    """
    start = np.asarray(init, dtype=np.float64) if init is not None else initial_slots(config, seed)
    if start.shape != (config.num_slots, config.slot_dim):
        raise ContractError(f"initial slots must be {(config.num_slots, config.slot_dim)}, got {start.shape}")
    if feats.batched:
        start = np.broadcast_to(start, (feats.tokens.shape[0], *start.shape))
    state = SlotState(slots=Tensor(start))
    for _ in range(config.slot_iters):
        state = slot_attention_step(state, feats, params)
        if on_step is not None:
            on_step(state)
    return state


def permute_slots(state: SlotState, order: ArrayLike) -> SlotState:
    """Reorder the slot axis of every field of ``state``."""
    index = np.asarray(order, dtype=np.int64)
    slots = ops.take(state.slots, index, axis=-2)
    attention = ops.take(state.attention, index, axis=-1) if state.attention is not None else None
    weights = ops.take(state.weights, index, axis=-1) if state.weights is not None else None
    return replace(state, slots=slots, attention=attention, weights=weights)


__all__ = ["SlotState", "initial_slots", "permute_slots", "run_slot_attention", "slot_attention_step"]

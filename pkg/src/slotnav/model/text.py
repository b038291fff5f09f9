"""Frozen hash-tokenised text encoder.

Text is lower-cased, split into word and punctuation tokens, and each token
is mapped to ``blake2b(token) mod vocab``. A small transformer runs over the
token embeddings; the mean-pooled output is projected and normalised.
"""

from __future__ import annotations

import hashlib
import re
from collections.abc import Sequence

import numpy as np

from ..autodiff import Array, Tensor, ops, scope
from ..domain.errors import ContractError
from .config import EncoderConfig
from .layers import Params, affine_norm, dense, transformer_block

_TOKEN_PATTERN = re.compile(r"\w+|[^\w\s]")


def tokenize(text: str, vocab: int, max_tokens: int) -> list[int]:
    """Hash tokens of ``text`` into ``range(vocab)``, keeping at most ``max_tokens``.

    Example:
        >>> tokenize("Sofa, sofa!", 512, 8) == tokenize("sofa , SOFA !", 512, 8)
        True
        >>> len(tokenize("a b c d", 512, 3))
        3
    """
    ids: list[int] = []
    for token in _TOKEN_PATTERN.findall(text.lower())[:max_tokens]:
        digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
        ids.append(int.from_bytes(digest, "little") % vocab)
    return ids


def encode_text_tensor(query: str, params: Params, config: EncoderConfig) -> Tensor:
    """Differentiable form of :func:`encode_text`; returns a ``(D,)`` tensor."""
    if not query.strip():
        raise ContractError("cannot encode an empty query")
    ids = tokenize(query, config.text_vocab, config.text_max_tokens)
    if not ids:
        raise ContractError(f"query {query!r} contains no tokens")
    with scope("text"):
        tokens = ops.take(params["text.embed"], ids, axis=0) + ops.take(params["text.pos"], range(len(ids)), axis=0)
        for index in range(config.text_depth):
            tokens = transformer_block(tokens, params, f"text.block{index}", config.heads)
        pooled = affine_norm(tokens, params, "text.ln").mean(axis=0)
        return ops.l2_normalize(dense(pooled, params["text.proj.weight"], params["text.proj.bias"]))


def encode_text(query: str, params: Params, config: EncoderConfig) -> Array:
    """Unit-norm ``(D,)`` embedding of ``query``.

    Raises:
        ContractError: ``query`` is empty or has no tokens.
    """
    return encode_text_tensor(query, params, config).numpy()


def encode_texts(queries: Sequence[str], params: Params, config: EncoderConfig) -> Array:
    """Stack :func:`encode_text` over ``queries`` into ``(M, D)``."""
    if not queries:
        return np.zeros((0, config.dim))
    return np.stack([encode_text(query, params, config) for query in queries])


__all__ = ["encode_text", "encode_text_tensor", "encode_texts", "tokenize"]

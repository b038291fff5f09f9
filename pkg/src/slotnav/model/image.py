"""Patch transformer image encoder and PPM image files."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike

from ..autodiff import Array, Tensor, scope
from ..domain.errors import ContractError, DataFormatError
from .config import EncoderConfig
from .layers import Params, affine_norm, dense, transformer_block

_MAX_VALUE = 255


@dataclass(frozen=True, slots=True)
class PatchFeatures:
    """Last-layer patch tokens and their mean.

    Attributes:
        tokens: ``(N, D)``, or ``(B, N, D)`` for a batch.
        pooled: ``(D,)`` or ``(B, D)``; the mean over tokens.
    """

    tokens: Tensor
    pooled: Tensor

    @property
    def batched(self) -> bool:
        return self.tokens.ndim == 3  # noqa: PLR2004


def as_images(images: ArrayLike) -> Array:
    """Validate ``(H, W, 3)`` or ``(B, H, W, 3)`` pixel data in ``[0, 1]``."""
    array = np.asarray(images, dtype=np.float64)
    if array.ndim not in (3, 4) or array.shape[-1] != 3:  # noqa: PLR2004
        raise ContractError(f"images must have shape (H, W, 3) or (B, H, W, 3), got {array.shape}")
    if not np.all(np.isfinite(array)) or array.min(initial=0.0) < 0.0 or array.max(initial=0.0) > 1.0:
        raise ContractError("pixel values must lie in [0, 1]")
    return array


def patchify(images: ArrayLike, patch_size: int) -> Array:
    """Cut images into row-major, non-overlapping patches.

    Returns ``(B, N, patch_size * patch_size * 3)``; a single image gets ``B = 1``.

    Example:
        >>> patchify(np.zeros((16, 16, 3)), 8).shape
        (1, 4, 192)
        >>> patchify(np.zeros((16, 12, 3)), 8)  # doctest: +IGNORE_EXCEPTION_DETAIL
        Traceback (most recent call last):
        ...
        slotnav.domain.errors.ContractError: image size (16, 12) is not divisible by patch size 8
    """
    array = as_images(images)
    if array.ndim == 3:  # noqa: PLR2004
        array = array[None]
    batch, height, width, channels = array.shape
    if height % patch_size or width % patch_size:
        raise ContractError(f"image size {(height, width)} is not divisible by patch size {patch_size}")
    rows, cols = height // patch_size, width // patch_size
    patches = array.reshape(batch, rows, patch_size, cols, patch_size, channels).transpose(0, 1, 3, 2, 4, 5)
    return patches.reshape(batch, rows * cols, patch_size * patch_size * channels)


def encode_images(images: ArrayLike, params: Params, config: EncoderConfig) -> PatchFeatures:
    """Encode a batch ``(B, H, W, 3)`` into ``(B, N, D)`` tokens and ``(B, D)`` pooled features."""
    patches = patchify(images, config.patch_size)
    if patches.shape[1] != params["image.pos"].shape[0]:
        raise ContractError(
            f"image yields {patches.shape[1]} patches, positional table has {params['image.pos'].shape[0]}"
        )
    with scope("image"):
        tokens = dense(Tensor(patches), params["image.patch.weight"], params["image.patch.bias"]) + params["image.pos"]
        for index in range(config.depth):
            tokens = transformer_block(tokens, params, f"image.block{index}", config.heads)
        tokens = affine_norm(tokens, params, "image.ln")
        return PatchFeatures(tokens=tokens, pooled=tokens.mean(axis=-2))


def encode_image(image: ArrayLike, params: Params, config: EncoderConfig) -> PatchFeatures:
    """Encode one ``(H, W, 3)`` image into ``(N, D)`` tokens and a ``(D,)`` pooled vector."""
    array = as_images(image)
    if array.ndim != 3:  # noqa: PLR2004
        raise ContractError(f"encode_image takes a single (H, W, 3) image, got {array.shape}")
    batch = encode_images(array[None], params, config)
    width = batch.tokens.shape[-1]
    return PatchFeatures(
        tokens=batch.tokens.reshape(batch.tokens.shape[1], width),
        pooled=batch.pooled.reshape(width),
    )


def _ppm_tokens(blob: bytes, count: int, source: str) -> tuple[list[int], int]:
    tokens: list[int] = []
    offset = 2
    while len(tokens) < count:
        while offset < len(blob) and blob[offset : offset + 1].isspace():
            offset += 1
        if offset < len(blob) and blob[offset : offset + 1] == b"#":
            while offset < len(blob) and blob[offset : offset + 1] not in (b"\n", b"\r"):
                offset += 1
            continue
        start = offset
        while offset < len(blob) and not blob[offset : offset + 1].isspace():
            offset += 1
        if start == offset:
            raise DataFormatError("truncated PPM header", path=source)
        try:
            tokens.append(int(blob[start:offset]))
        except ValueError as exc:
            raise DataFormatError(f"bad PPM header field {blob[start:offset]!r}", path=source) from exc
    return tokens, offset


def _ppm_pixels(blob: bytes, offset: int, expected: int, *, binary: bool) -> Array | None:
    if binary:
        start = offset + 1
        if len(blob) < start + expected:
            return None
        return np.frombuffer(blob, dtype=np.uint8, count=expected, offset=start).astype(np.float64)
    values = blob[offset:].split()
    if len(values) < expected:
        return None
    return np.array([int(value) for value in values[:expected]], dtype=np.float64)


def read_ppm(path: str | Path) -> Array:
    """Read a binary (P6) or ASCII (P3) PPM into ``(H, W, 3)`` floats in ``[0, 1]``."""
    source = Path(path)
    blob = source.read_bytes()
    magic = blob[:2]
    if magic not in (b"P6", b"P3"):
        raise DataFormatError("not a PPM image (expected P6 or P3)", path=source)
    header_count = 3
    (width, height, maxval), offset = _ppm_tokens(blob, header_count, str(source))
    if not 0 < maxval <= _MAX_VALUE:
        raise DataFormatError(f"unsupported PPM maxval {maxval}", path=source)
    expected = width * height * 3
    pixels = _ppm_pixels(blob, offset, expected, binary=magic == b"P6")
    if pixels is None:
        raise DataFormatError("truncated PPM pixel data", path=source)
    return pixels.reshape(height, width, 3).astype(np.float64) / maxval


def write_ppm(path: str | Path, image: ArrayLike) -> Path:
    """Write ``(H, W, 3)`` floats in ``[0, 1]`` as a binary P6 PPM."""
    array = as_images(image)
    if array.ndim != 3:  # noqa: PLR2004
        raise ContractError(f"write_ppm takes a single (H, W, 3) image, got {array.shape}")
    height, width, _ = array.shape
    pixels = np.rint(array * _MAX_VALUE).astype(np.uint8)
    target = Path(path)
    target.write_bytes(f"P6\n{width} {height}\n{_MAX_VALUE}\n".encode("ascii") + pixels.tobytes())
    return target


__all__ = ["PatchFeatures", "as_images", "encode_image", "encode_images", "patchify", "read_ppm", "write_ppm"]

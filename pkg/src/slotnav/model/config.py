"""Encoder hyper-parameters."""

from __future__ import annotations

from typing import Any

from pydantic import BaseModel, ConfigDict, Field, model_validator


class EncoderConfig(BaseModel):
    """Shape and initialisation settings shared by the image and text encoders.

    The defaults are the desk-scale model (16x16 images, ``D = D_s = 32``,
    ``K = 4`` slots, ``U = 3`` iterations). :meth:`full_scale` returns the
    full-scale preset.

    Example:
        >>> cfg = EncoderConfig()
        >>> cfg.num_patches, cfg.patch_dim
        (4, 192)
        >>> EncoderConfig(num_slots=0)  # doctest: +IGNORE_EXCEPTION_DETAIL
        Traceback (most recent call last):
        ...
        pydantic_core._pydantic_core.ValidationError: ...
    """

    model_config = ConfigDict(frozen=True, extra="ignore")

    image_size: int = Field(default=16, ge=1)
    patch_size: int = Field(default=8, ge=1)
    #: D, width of patch tokens and of the final embeddings
    dim: int = Field(default=32, ge=2)
    #: D_s, width of a slot
    slot_dim: int = Field(default=32, ge=2)
    #: K
    num_slots: int = Field(default=4, ge=1)
    #: U
    slot_iters: int = Field(default=3, ge=1)
    depth: int = Field(default=1, ge=0)
    heads: int = Field(default=2, ge=1)
    mlp_ratio: int = Field(default=2, ge=1)
    slot_mu: float = 0.0
    #: per-dimension deviation; a single value applies to every dimension
    slot_sigma: float | tuple[float, ...] = 1.0
    text_vocab: int = Field(default=512, ge=2)
    text_max_tokens: int = Field(default=24, ge=1)
    text_depth: int = Field(default=1, ge=0)
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _check_consistency(self) -> EncoderConfig:
        if self.image_size % self.patch_size:
            raise ValueError(f"image_size {self.image_size} is not divisible by patch_size {self.patch_size}")
        if self.dim % self.heads:
            raise ValueError(f"dim {self.dim} is not divisible by heads {self.heads}")
        sigma = self.slot_sigma if isinstance(self.slot_sigma, tuple) else (self.slot_sigma,)
        if any(value <= 0 for value in sigma):
            raise ValueError("slot_sigma must be positive in every dimension")
        if isinstance(self.slot_sigma, tuple) and len(self.slot_sigma) != self.slot_dim:
            raise ValueError(f"slot_sigma has {len(self.slot_sigma)} entries, slot_dim is {self.slot_dim}")
        return self

    @property
    def grid(self) -> int:
        return self.image_size // self.patch_size

    @property
    def num_patches(self) -> int:
        return self.grid * self.grid

    @property
    def patch_dim(self) -> int:
        return self.patch_size * self.patch_size * 3

    @classmethod
    def full_scale(cls, **overrides: Any) -> EncoderConfig:
        """Full-scale preset: 224x224 images, 16-pixel patches, ViT-B widths, K=10, U=20."""
        values: dict[str, Any] = {
            "image_size": 224,
            "patch_size": 16,
            "dim": 768,
            "slot_dim": 768,
            "num_slots": 10,
            "slot_iters": 20,
            "depth": 12,
            "heads": 12,
            "mlp_ratio": 4,
            "text_depth": 12,
            "text_vocab": 30522,
            "text_max_tokens": 77,
        }
        values.update(overrides)
        return cls(**values)


__all__ = ["EncoderConfig"]

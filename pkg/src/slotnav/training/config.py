"""Training hyper-parameters and the learning-rate schedule."""

from __future__ import annotations

from typing import Any

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..domain.enums import MatchCost, PromptStyle
from ..domain.errors import ContractError
from ..model import EncoderConfig
from ..objectives import LossWeights


class TrainConfig(BaseModel):
    """Optimiser, schedule and model settings of a training run.

    A learning rate of zero is accepted and turns every step into a no-op
    update. :meth:`full_scale` returns the full-scale preset.

    Example:
        >>> cfg = TrainConfig(total_steps=10, warmup_steps=20)  # doctest: +IGNORE_EXCEPTION_DETAIL
        Traceback (most recent call last):
        ...
        pydantic_core._pydantic_core.ValidationError: ...
    """

    model_config = ConfigDict(frozen=True, extra="ignore")

    learning_rate: float = Field(default=1e-5, ge=0.0)
    #: factor the rate has shrunk by at ``total_steps``
    decay: float = Field(default=1e-2, gt=0.0, le=1.0)
    batch_size: int = Field(default=4, ge=1)
    warmup_steps: int = Field(default=0, ge=0)
    total_steps: int = Field(default=200, ge=1)
    #: global-norm clip; ``None`` disables clipping
    max_grad_norm: float | None = Field(default=1.0, gt=0.0)
    seed: int = Field(default=0, ge=0)
    match_cost: MatchCost = MatchCost.ONE_MINUS_GIOU
    prompt_style: PromptStyle = PromptStyle.NOUN_SENTENCE
    weights: LossWeights = LossWeights()
    encoder: EncoderConfig = EncoderConfig()

    @model_validator(mode="after")
    def _warmup_fits(self) -> TrainConfig:
        if self.warmup_steps > self.total_steps:
            raise ValueError(f"warmup_steps {self.warmup_steps} exceeds total_steps {self.total_steps}")
        return self

    @classmethod
    def full_scale(cls, **overrides: Any) -> TrainConfig:
        """Full-scale preset: batch 32, learning rate 1e-5, 1000 warmup steps, 50k steps."""
        values: dict[str, Any] = {
            "learning_rate": 1e-5,
            "decay": 1e-2,
            "batch_size": 32,
            "warmup_steps": 1000,
            "total_steps": 50_000,
            "encoder": EncoderConfig.full_scale(),
        }
        values.update(overrides)
        return cls(**values)


def learning_rate_at(step: int, config: TrainConfig) -> float:
    """Linear warmup over ``warmup_steps``, then exponential decay to ``lr * decay`` at ``total_steps``.

    Example:
        >>> cfg = TrainConfig(learning_rate=1.0, warmup_steps=4, total_steps=14, decay=0.01)
        >>> [round(learning_rate_at(step, cfg), 6) for step in (0, 3, 4, 9, 14)]
        [0.25, 1.0, 1.0, 0.1, 0.01]
    """
    if step < 0:
        raise ContractError(f"step must be >= 0, got {step}")
    if step < config.warmup_steps:
        return config.learning_rate * (step + 1) / config.warmup_steps
    span = max(config.total_steps - config.warmup_steps, 1)
    progress = min(step - config.warmup_steps, span) / span
    return config.learning_rate * config.decay**progress


__all__ = ["TrainConfig", "learning_rate_at"]

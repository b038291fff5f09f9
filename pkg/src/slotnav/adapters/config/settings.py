"""Typed settings validated from the layered configuration sections.

Each section maps onto the pydantic model the core packages already use:
``[encoder]`` onto :class:`EncoderConfig`, ``[objectives]`` onto
:class:`LossWeights`, ``[train]`` onto :class:`TrainConfig`,
``[navigation]`` onto :class:`NavigationSettings` and ``[generation]`` onto
:class:`GenerationSettings`. Unknown keys are ignored; out-of-range values
fail with the pydantic message naming the section.
"""

from __future__ import annotations

import logging
import os
from typing import TYPE_CHECKING, Any, cast

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from slotnav.domain.enums import MatchCost
from slotnav.domain.errors import ContractError
from slotnav.model import EncoderConfig
from slotnav.navsim import NavigationSettings
from slotnav.objectives import LossWeights
from slotnav.promptgen import ChatBackend, GenerationBackend, GenerationClient, StubBackend
from slotnav.training import TrainConfig

if TYPE_CHECKING:
    from lib_layered_config import Config

logger = logging.getLogger(__name__)


class GenerationSettings(BaseModel):
    """``[generation]``: where caption sentences come from.

    With ``offline`` set, or no ``endpoint``, the deterministic stub answers.

    Example:
        >>> GenerationSettings().backend()
        StubBackend(seed=0)
    """

    model_config = ConfigDict(frozen=True, extra="ignore")

    endpoint: str = ""
    model: str = "gpt-3.5-turbo"
    #: environment variable holding the bearer token
    api_key_env: str = "SLOTNAV_API_KEY"
    timeout: float = Field(default=30.0, gt=0.0)
    retries: int = Field(default=2, ge=0)
    temperature: float = Field(default=0.7, ge=0.0)
    sentences: int = Field(default=3, ge=1)
    seed: int = Field(default=0, ge=0)
    offline: bool = False

    def backend(self) -> GenerationBackend:
        if self.offline or not self.endpoint:
            return StubBackend(seed=self.seed)
        return ChatBackend(
            endpoint=self.endpoint,
            model=self.model,
            api_key=os.environ.get(self.api_key_env) or None,
            timeout=self.timeout,
            retries=self.retries,
            temperature=self.temperature,
        )

    def client(self) -> GenerationClient:
        return GenerationClient(self.backend(), retries=self.retries)


class AppSettings(BaseModel):
    """Every validated section in one frozen object."""

    model_config = ConfigDict(frozen=True)

    train: TrainConfig = TrainConfig()
    navigation: NavigationSettings = NavigationSettings()
    generation: GenerationSettings = GenerationSettings()

    @property
    def encoder(self) -> EncoderConfig:
        return self.train.encoder

    @property
    def weights(self) -> LossWeights:
        return self.train.weights


def _section(config: Config, name: str) -> dict[str, Any]:
    raw = config.get(name, default={})
    if not isinstance(raw, dict):
        raise ContractError(f"configuration section [{name}] must be a table, got {type(raw).__name__}")
    return dict(cast("dict[str, Any]", raw))


def load_settings(config: Config) -> AppSettings:
    """Validate ``[encoder]``, ``[objectives]``, ``[train]``, ``[navigation]`` and ``[generation]``.

    ``[objectives].match_cost`` selects the box-matching cost; the remaining
    ``[objectives]`` keys are the loss weights.

    Raises:
        ContractError: a section is not a table or holds an invalid value.

    Example:
        >>> from lib_layered_config import Config
        >>> settings = load_settings(Config({"train": {"batch_size": 2}, "objectives": {"delta": 0}}, {}))
        >>> settings.train.batch_size, settings.weights.delta
        (2, 0.0)
    """
    objectives = _section(config, "objectives")
    match_cost = objectives.pop("match_cost", MatchCost.ONE_MINUS_GIOU.value)
    section = "encoder"
    try:
        encoder = EncoderConfig.model_validate(_section(config, section))
        section = "objectives"
        weights = LossWeights.model_validate(objectives)
        section = "train"
        train = TrainConfig.model_validate(
            {**_section(config, section), "weights": weights, "encoder": encoder, "match_cost": match_cost}
        )
        section = "navigation"
        navigation = NavigationSettings.model_validate(_section(config, section))
        section = "generation"
        generation = GenerationSettings.model_validate(_section(config, section))
    except ValidationError as exc:
        raise ContractError(f"invalid [{section}] configuration: {exc}") from exc
    logger.debug("settings loaded", extra={"seed": train.seed, "offline": generation.offline})
    return AppSettings(train=train, navigation=navigation, generation=generation)


__all__ = ["AppSettings", "GenerationSettings", "load_settings"]

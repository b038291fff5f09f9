"""One lib_log_rich runtime per process, configured from ``[lib_log_rich]``.

Numeric modules log through ``logging.getLogger(__name__)`` only and never
import lib_log_rich; :func:`init_logging` bridges std logging into the
runtime so training progress and skipped records reach the console.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

import lib_log_rich.config
import lib_log_rich.runtime
from pydantic import BaseModel, ConfigDict

from slotnav import __init__conf__

if TYPE_CHECKING:
    from lib_layered_config import Config


class LoggingConfigModel(BaseModel):
    """The ``[lib_log_rich]`` section; keys beyond these two go to ``RuntimeConfig`` as they are.

    Example:
        >>> LoggingConfigModel(console_level="WARNING").runtime_kwargs()
        {'console_level': 'WARNING'}
    """

    model_config = ConfigDict(extra="allow")

    service: str | None = None
    environment: str = "prod"

    def runtime_kwargs(self) -> dict[str, Any]:
        return self.model_dump(exclude={"service", "environment"}, exclude_none=True)


def runtime_config(config: Config) -> lib_log_rich.runtime.RuntimeConfig:
    """``RuntimeConfig`` for ``config``; the service name defaults to ``slotnav``."""
    section: Any = config.get("lib_log_rich", default={}) or {}
    parsed = LoggingConfigModel.model_validate(section)
    return lib_log_rich.runtime.RuntimeConfig(
        service=parsed.service or __init__conf__.name,
        environment=parsed.environment,
        **parsed.runtime_kwargs(),
    )


def init_logging(config: Config) -> None:
    """Start the runtime unless it is already running; ``LOG_*`` variables from ``.env`` apply."""
    if lib_log_rich.runtime.is_initialised():
        return
    lib_log_rich.config.enable_dotenv()
    lib_log_rich.runtime.init(runtime_config(config))
    lib_log_rich.runtime.attach_std_logging()


__all__ = ["LoggingConfigModel", "init_logging", "runtime_config"]

"""Ports the CLI depends on; adapters implement them, ``composition`` wires them."""

from __future__ import annotations

from .ports import ApplyConfigFiles, DisplayConfig, GetConfig, InitLogging, LoadSettings

__all__ = ["ApplyConfigFiles", "DisplayConfig", "GetConfig", "InitLogging", "LoadSettings"]

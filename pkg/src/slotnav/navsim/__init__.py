"""Grid-world navigation driven by text-to-image retrieval over an image-pose memory."""

from __future__ import annotations

from .episode import (
    EpisodeResult,
    NavigationEvaluation,
    NavigationSettings,
    SuccessReport,
    evaluate_navigation,
    execute_episode,
    success_rate,
    write_episode_log,
)
from .geometry import Point, Pose, angle_between, normalize_angle
from .memory import (
    LookupEncoder,
    MemoryEntry,
    NavQuery,
    QueryEncoder,
    TextModelEncoder,
    memory_index,
    read_memory,
    read_nav_queries,
    write_memory,
)
from .planner import DEFAULT_HALF_ANGLE, DEFAULT_MAX_RANGE, in_fov, line_of_sight, path_length, plan_path, ray_cells
from .world import DEFAULT_CELL_M, Cell, GridWorld, WorldObject, load_world, parse_world, render_world

__all__ = [
    "DEFAULT_CELL_M",
    "DEFAULT_HALF_ANGLE",
    "DEFAULT_MAX_RANGE",
    "Cell",
    "EpisodeResult",
    "GridWorld",
    "LookupEncoder",
    "MemoryEntry",
    "NavQuery",
    "NavigationEvaluation",
    "NavigationSettings",
    "Point",
    "Pose",
    "QueryEncoder",
    "SuccessReport",
    "TextModelEncoder",
    "WorldObject",
    "angle_between",
    "evaluate_navigation",
    "execute_episode",
    "in_fov",
    "line_of_sight",
    "load_world",
    "memory_index",
    "normalize_angle",
    "parse_world",
    "path_length",
    "plan_path",
    "ray_cells",
    "read_memory",
    "read_nav_queries",
    "render_world",
    "success_rate",
    "write_episode_log",
    "write_memory",
]

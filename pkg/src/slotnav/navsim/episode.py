"""Retrieval-driven navigation episodes and success rates.

An episode encodes the query, ranks the memory by similarity, and visits the
top ``k`` candidate poses in rank order. Motion follows the planned
waypoints exactly and arrives with the heading stored in memory. The robot stops at the first
candidate pose from which the target object is in view, or after the last
reachable candidate.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import orjson
from pydantic import BaseModel, ConfigDict, Field

from ..domain.errors import ContractError
from ..retrieval import topk_images
from .geometry import Pose
from .memory import MemoryEntry, NavQuery, QueryEncoder, memory_index
from .planner import in_fov, path_length, plan_path
from .world import GridWorld

logger = logging.getLogger(__name__)


class NavigationSettings(BaseModel):
    """Camera model and episode knobs.

    Example:
        >>> NavigationSettings().half_angle
        0.7853981633974483
    """

    model_config = ConfigDict(frozen=True, extra="ignore")

    cell_m: float = Field(default=0.25, gt=0.0)
    half_angle_deg: float = Field(default=45.0, gt=0.0, lt=180.0)
    max_range: float = Field(default=3.0, gt=0.0)
    occlusion: bool = True
    k: int = Field(default=3, ge=1)
    radii: tuple[float, ...] = (1.0, 2.0)

    @property
    def half_angle(self) -> float:
        return math.radians(self.half_angle_deg)


@dataclass(frozen=True, slots=True)
class EpisodeResult:
    """Outcome of one episode.

    Attributes:
        query: the navigation request.
        target: id of the object the request refers to.
        candidates: memory ids in rank order (first ``k``).
        visited: candidate poses reached, in order; the last one is the stop pose.
        stop: final pose (the start pose when nothing was reachable).
        distance: meters from ``stop`` to the target object's center.
        in_view: target in the field of view at ``stop``.
        path_cells: moves made along planned paths.
        skipped: candidates that could not be reached.
    """

    query: str
    target: str
    candidates: tuple[str, ...]
    visited: tuple[Pose, ...]
    stop: Pose
    distance: float
    in_view: bool
    path_cells: int
    skipped: tuple[str, ...] = ()

    @property
    def reached_any(self) -> bool:
        return bool(self.visited)

    def as_record(self) -> dict[str, object]:
        return {
            "query": self.query,
            "target": self.target,
            "candidates": list(self.candidates),
            "stop": self.stop.as_dict(),
            "distance": self.distance,
            "in_fov": self.in_view,
            "visited": len(self.visited),
            "path_cells": self.path_cells,
            "skipped": list(self.skipped),
        }


def execute_episode(
    query: NavQuery,
    memory: Sequence[MemoryEntry],
    world: GridWorld,
    k: int,
    encoder: QueryEncoder,
    *,
    settings: NavigationSettings | None = None,
    start: Pose | None = None,
) -> EpisodeResult:
    """Run one retrieval-then-navigate episode.

    Raises:
        ContractError: ``k < 1``, empty memory or an unknown target object.
    """
    options = settings or NavigationSettings()
    if k < 1:
        raise ContractError(f"k must be >= 1, got {k}")
    index = memory_index(memory)
    goal = world.position(query.target)
    by_id = {entry.image_id: entry for entry in memory}
    candidates = topk_images(encoder(query.query), index, min(k, len(index)))

    pose = start or world.start_pose()
    visited: list[Pose] = []
    skipped: list[str] = []
    moves = 0
    seen = False
    for candidate in candidates:
        entry = by_id[candidate]
        cell = world.cell_of(entry.pose.position)
        reachable = world.is_free(cell) and world.is_free(world.cell_of(pose.position))
        path = plan_path(world, pose, cell) if reachable else []
        if not path:
            logger.warning("skipping unreachable candidate", extra={"query": query.query, "candidate": candidate})
            skipped.append(candidate)
            continue
        moves += path_length(path)
        pose = entry.pose
        visited.append(pose)
        seen = in_fov(pose, goal, options.half_angle, options.max_range, world=world, occlusion=options.occlusion)
        if seen:
            break
    return EpisodeResult(
        query=query.query,
        target=query.target,
        candidates=tuple(candidates),
        visited=tuple(visited),
        stop=pose,
        distance=pose.distance_to(goal),
        in_view=seen,
        path_cells=moves,
        skipped=tuple(skipped),
    )


@dataclass(frozen=True, slots=True)
class SuccessReport:
    """Success rate at one radius, plus the FOV-only rate."""

    radius: float
    success_rate: float
    fov_rate: float
    episodes: int
    successes: int = 0

    def as_record(self) -> dict[str, float | int]:
        return {
            "radius_m": self.radius,
            "sr": self.success_rate,
            "fov_rate": self.fov_rate,
            "episodes": self.episodes,
            "successes": self.successes,
        }


def success_rate(episodes: Sequence[EpisodeResult], radius: float) -> SuccessReport:
    """Fraction of episodes ending within ``radius`` meters with the target in view.

    Example:
        >>> stop = Pose(0.0, 0.0)
        >>> runs = [EpisodeResult("q", "o", (), (stop,), stop, d, True, 0) for d in (0.5, 1.5, 1.5, 3.0)]
        >>> success_rate(runs, 1.0).success_rate, success_rate(runs, 2.0).success_rate
        (0.25, 0.75)
    """
    if radius <= 0:
        raise ContractError(f"radius must be positive, got {radius}")
    if not episodes:
        raise ContractError("success_rate needs at least one episode")
    hits = sum(1 for run in episodes if run.in_view and run.distance <= radius)
    in_view = sum(1 for run in episodes if run.in_view)
    total = len(episodes)
    return SuccessReport(
        radius=radius, success_rate=hits / total, fov_rate=in_view / total, episodes=total, successes=hits
    )


@dataclass(frozen=True, slots=True)
class NavigationEvaluation:
    episodes: tuple[EpisodeResult, ...]
    reports: tuple[SuccessReport, ...] = field(default=())


def evaluate_navigation(
    queries: Iterable[NavQuery],
    memory: Sequence[MemoryEntry],
    world: GridWorld,
    encoder: QueryEncoder,
    settings: NavigationSettings | None = None,
) -> NavigationEvaluation:
    """Run every query and report success rates at each configured radius."""
    options = settings or NavigationSettings()
    episodes = tuple(execute_episode(query, memory, world, options.k, encoder, settings=options) for query in queries)
    reports = tuple(success_rate(episodes, radius) for radius in options.radii)
    return NavigationEvaluation(episodes=episodes, reports=reports)


def write_episode_log(path: str | Path, episodes: Iterable[EpisodeResult]) -> Path:
    """One JSON record per episode: query, ranked candidates, stop pose, distance, FOV flag."""
    target = Path(path)
    with target.open("wb") as handle:
        for episode in episodes:
            handle.write(orjson.dumps(episode.as_record()) + b"\n")
    return target


__all__ = [
    "EpisodeResult",
    "NavigationEvaluation",
    "NavigationSettings",
    "SuccessReport",
    "evaluate_navigation",
    "execute_episode",
    "success_rate",
    "write_episode_log",
]

"""Global planning and field-of-view checks on a :class:`GridWorld`."""

from __future__ import annotations

import math
from collections import deque

from ..domain.errors import ContractError
from .geometry import Point, Pose, angle_between
from .world import Cell, GridWorld

#: Default camera model: 45 degree half-angle, 3 m range.
DEFAULT_HALF_ANGLE = math.radians(45.0)
DEFAULT_MAX_RANGE = 3.0


def plan_path(world: GridWorld, start: Pose | Cell, goal: Pose | Cell) -> list[Cell]:
    """Shortest 4-connected path from ``start`` to ``goal``, both ends included.

    Returns an empty list when the goal is unreachable. Among equally short
    paths the one found by expanding neighbours in the order ``+x, +y, -x, -y``
    is returned.

    Raises:
        ContractError: start or goal cell is occupied or outside the grid.

    Example:
        >>> import numpy as np
        >>> corridor = GridWorld(np.zeros((1, 6), dtype=bool))
        >>> len(plan_path(corridor, (0, 0), (5, 0))) - 1
        5
    """
    begin = world.cell_of(start.position) if isinstance(start, Pose) else start
    end = world.cell_of(goal.position) if isinstance(goal, Pose) else goal
    for name, cell in (("start", begin), ("goal", end)):
        if not world.is_free(cell):
            raise ContractError(f"{name} cell {cell} is occupied or outside the grid")
    parent: dict[Cell, Cell | None] = {begin: None}
    frontier: deque[Cell] = deque([begin])
    while frontier:
        cell = frontier.popleft()
        if cell == end:
            break
        for nxt in world.neighbours(cell):
            if nxt not in parent:
                parent[nxt] = cell
                frontier.append(nxt)
    if end not in parent:
        return []
    path: list[Cell] = []
    node: Cell | None = end
    while node is not None:
        path.append(node)
        node = parent[node]
    return path[::-1]


def path_length(path: list[Cell]) -> int:
    """Number of moves along ``path`` (0 for an empty or single-cell path)."""
    return max(len(path) - 1, 0)


def ray_cells(world: GridWorld, origin: Point, target: Point) -> list[Cell]:
    """Cells crossed by the segment ``origin -> target`` in traversal order.

    Grid traversal in the style of Amanatides and Woo over cell units; both end
    cells are included.
    """
    x0, y0 = origin[0] / world.cell_m, origin[1] / world.cell_m
    x1, y1 = target[0] / world.cell_m, target[1] / world.cell_m
    cx, cy = math.floor(x0), math.floor(y0)
    end = (math.floor(x1), math.floor(y1))
    dx, dy = x1 - x0, y1 - y0
    step_x = 1 if dx > 0 else -1
    step_y = 1 if dy > 0 else -1
    t_dx = abs(1.0 / dx) if dx else math.inf
    t_dy = abs(1.0 / dy) if dy else math.inf
    t_x = ((cx + 1 - x0) if dx > 0 else (x0 - cx)) * t_dx if dx else math.inf
    t_y = ((cy + 1 - y0) if dy > 0 else (y0 - cy)) * t_dy if dy else math.inf
    cells = [(cx, cy)]
    limit = abs(end[0] - cx) + abs(end[1] - cy)
    for _ in range(limit):
        if t_x < t_y:
            cx += step_x
            t_x += t_dx
        else:
            cy += step_y
            t_y += t_dy
        cells.append((cx, cy))
    return cells


def line_of_sight(world: GridWorld, origin: Point, target: Point) -> bool:
    """``True`` when no occupied cell lies strictly between the two end cells."""
    return not any(world.occupied_at(cell) for cell in ray_cells(world, origin, target)[1:-1] if world.contains(cell))


def in_fov(
    pose: Pose,
    target: Point,
    half_angle: float = DEFAULT_HALF_ANGLE,
    max_range: float = DEFAULT_MAX_RANGE,
    *,
    world: GridWorld | None = None,
    occlusion: bool = True,
) -> bool:
    """Whether ``target`` is inside the view sector of ``pose``.

    The target must be within ``max_range``, within ``half_angle`` of the
    heading and, when a ``world`` is given and ``occlusion`` is on, visible
    along an unobstructed grid ray.

    Raises:
        ContractError: ``half_angle`` outside ``(0, pi)`` or ``max_range <= 0``.

    Example:
        >>> in_fov(Pose(0.0, 0.0, 0.0), (1.0, 0.5), math.radians(45), 3.0)
        True
        >>> in_fov(Pose(0.0, 0.0, 0.0), (-1.0, 0.0), math.radians(45), 3.0)
        False
    """
    if not 0.0 < half_angle < math.pi:
        raise ContractError(f"half_angle must be in (0, pi), got {half_angle}")
    if max_range <= 0.0:
        raise ContractError(f"max_range must be positive, got {max_range}")
    distance = pose.distance_to(target)
    if distance > max_range:
        return False
    if distance > 0.0 and angle_between(pose.bearing_to(target), pose.theta) > half_angle:
        return False
    if world is not None and occlusion:
        return line_of_sight(world, pose.position, target)
    return True


__all__ = [
    "DEFAULT_HALF_ANGLE",
    "DEFAULT_MAX_RANGE",
    "in_fov",
    "line_of_sight",
    "path_length",
    "plan_path",
    "ray_cells",
]

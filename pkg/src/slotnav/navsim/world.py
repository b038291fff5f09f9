"""Occupancy grid worlds with placed objects.

World file layout::

    #######
    #..#..#          grid rows: '#' occupied, '.' free
    #.....#
    #######
                     blank line
    start 1 1 0      optional: start cell_x cell_y heading_degrees
    o1 sofa 4 1      objects: id noun cell_x cell_y

Lines of the object table starting with ``;`` are comments.
"""

from __future__ import annotations

import math
from collections.abc import Iterator
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from ..domain.errors import ContractError, DataFormatError
from .geometry import Point, Pose

Cell = tuple[int, int]

#: Cell edge length in meters unless the world says otherwise.
DEFAULT_CELL_M = 0.25

_STEPS: tuple[Cell, ...] = ((1, 0), (0, 1), (-1, 0), (0, -1))


@dataclass(frozen=True, slots=True)
class WorldObject:
    id: str
    noun: str
    cell: Cell


@dataclass(frozen=True, slots=True, eq=False)
class GridWorld:
    """Rectangular occupancy grid (``occupied[row, col]``) plus object instances.

    Cells are addressed as ``(cell_x, cell_y) = (col, row)``; a cell's center
    lies at ``((cell_x + 0.5) * cell_m, (cell_y + 0.5) * cell_m)``.
    """

    occupied: NDArray[np.bool_] = field(repr=False)
    objects: tuple[WorldObject, ...] = ()
    cell_m: float = DEFAULT_CELL_M
    start: Pose | None = None
    _by_id: dict[str, WorldObject] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        grid = np.asarray(self.occupied, dtype=np.bool_)
        if grid.ndim != 2 or grid.size == 0:  # noqa: PLR2004
            raise ContractError(f"occupancy grid must be a non-empty matrix, got shape {grid.shape}")
        if self.cell_m <= 0:
            raise ContractError(f"cell size must be positive, got {self.cell_m}")
        grid = grid.copy()
        grid.setflags(write=False)
        object.__setattr__(self, "occupied", grid)
        by_id: dict[str, WorldObject] = {}
        for obj in self.objects:
            if obj.id in by_id:
                raise ContractError(f"duplicate object id {obj.id!r}")
            if not self.contains(obj.cell):
                raise ContractError(f"object {obj.id!r} at {obj.cell} lies outside the grid")
            if self.occupied_at(obj.cell) and not any(self.is_free(n) for n in self.neighbours(obj.cell, free=False)):
                raise ContractError(f"object {obj.id!r} at {obj.cell} is not reachable from free space")
            by_id[obj.id] = obj
        object.__setattr__(self, "_by_id", by_id)

    @property
    def width(self) -> int:
        return int(self.occupied.shape[1])

    @property
    def height(self) -> int:
        return int(self.occupied.shape[0])

    def contains(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.width and 0 <= cell[1] < self.height

    def occupied_at(self, cell: Cell) -> bool:
        return bool(self.occupied[cell[1], cell[0]])

    def is_free(self, cell: Cell) -> bool:
        return self.contains(cell) and not self.occupied_at(cell)

    def neighbours(self, cell: Cell, *, free: bool = True) -> Iterator[Cell]:
        """4-connected neighbours in a fixed order (+x, +y, -x, -y)."""
        for dx, dy in _STEPS:
            nxt = (cell[0] + dx, cell[1] + dy)
            if self.contains(nxt) and (not free or not self.occupied_at(nxt)):
                yield nxt

    def cell_of(self, point: Point) -> Cell:
        return (math.floor(point[0] / self.cell_m), math.floor(point[1] / self.cell_m))

    def center(self, cell: Cell) -> Point:
        return ((cell[0] + 0.5) * self.cell_m, (cell[1] + 0.5) * self.cell_m)

    def object(self, object_id: str) -> WorldObject:
        if object_id not in self._by_id:
            raise ContractError(f"unknown object {object_id!r}")
        return self._by_id[object_id]

    def position(self, object_id: str) -> Point:
        return self.center(self.object(object_id).cell)

    def start_pose(self) -> Pose:
        """Configured start, else the first free cell in row-major order facing +x."""
        if self.start is not None:
            return self.start
        rows, cols = np.nonzero(~self.occupied)
        if rows.size == 0:
            raise ContractError("world has no free cell")
        x, y = self.center((int(cols[0]), int(rows[0])))
        return Pose(x, y, 0.0)


def _object_line(parts: list[str], source: str, number: int) -> WorldObject:
    if len(parts) != 4:  # noqa: PLR2004
        raise DataFormatError("expected 'id noun cell_x cell_y'", path=source, line=number)
    try:
        cell = (int(parts[2]), int(parts[3]))
    except ValueError as exc:
        raise DataFormatError(
            f"object cell must be integers: {parts[2]!r} {parts[3]!r}", path=source, line=number
        ) from exc
    return WorldObject(id=parts[0], noun=parts[1], cell=cell)


def _start_line(parts: list[str], cell_m: float, source: str, number: int) -> Pose:
    if len(parts) not in (3, 4):
        raise DataFormatError("expected 'start cell_x cell_y [heading_degrees]'", path=source, line=number)
    try:
        cx, cy = int(parts[1]), int(parts[2])
        heading = float(parts[3]) if len(parts) == 4 else 0.0  # noqa: PLR2004
    except ValueError as exc:
        raise DataFormatError("start cell must be integers and heading a number", path=source, line=number) from exc
    return Pose((cx + 0.5) * cell_m, (cy + 0.5) * cell_m, math.radians(heading))


def parse_world(text: str, *, cell_m: float = DEFAULT_CELL_M, source: str = "<world>") -> GridWorld:
    """Parse the text grid and object table described in the module docstring.

    Raises:
        DataFormatError: ragged grid, unknown grid symbol, bad object row, or an
            object/start outside the grid, carrying path and line.
    """
    lines = text.splitlines()
    rows: list[list[bool]] = []
    number = 0
    for number, raw in enumerate(lines, start=1):
        line = raw.rstrip()
        if not line:
            break
        if set(line) - {"#", "."}:
            raise DataFormatError(f"grid rows may only contain '#' and '.', got {line!r}", path=source, line=number)
        if rows and len(line) != len(rows[0]):
            raise DataFormatError(f"grid row has {len(line)} cells, expected {len(rows[0])}", path=source, line=number)
        rows.append([symbol == "#" for symbol in line])
    else:
        number = len(lines) + 1
    if not rows:
        raise DataFormatError("world has no grid rows", path=source, line=1)

    objects: list[WorldObject] = []
    start: Pose | None = None
    for offset, raw in enumerate(lines[number:], start=number + 1):
        parts = raw.split()
        if not parts or parts[0].startswith(";"):
            continue
        if parts[0] == "start":
            start = _start_line(parts, cell_m, source, offset)
        else:
            objects.append(_object_line(parts, source, offset))
    try:
        return GridWorld(np.array(rows, dtype=np.bool_), tuple(objects), cell_m, start)
    except ContractError as exc:
        raise DataFormatError(str(exc), path=source) from exc


def load_world(path: str | Path, *, cell_m: float = DEFAULT_CELL_M) -> GridWorld:
    source = Path(path)
    return parse_world(source.read_text(encoding="utf-8"), cell_m=cell_m, source=str(source))


def render_world(world: GridWorld) -> str:
    """Inverse of :func:`parse_world` (start heading in whole degrees)."""
    grid = "\n".join("".join("#" if cell else "." for cell in row) for row in world.occupied)
    table: list[str] = []
    if world.start is not None:
        cx, cy = world.cell_of(world.start.position)
        table.append(f"start {cx} {cy} {round(math.degrees(world.start.theta))}")
    table.extend(f"{obj.id} {obj.noun} {obj.cell[0]} {obj.cell[1]}" for obj in world.objects)
    return grid + "\n\n" + "\n".join(table) + ("\n" if table else "")


__all__ = [
    "DEFAULT_CELL_M",
    "Cell",
    "GridWorld",
    "WorldObject",
    "load_world",
    "parse_world",
    "render_world",
]

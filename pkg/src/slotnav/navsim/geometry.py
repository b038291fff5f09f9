"""Poses and angles in the metric map frame.

The map frame has ``x`` along grid columns and ``y`` along grid rows; both in
meters. Headings are radians measured from ``+x`` towards ``+y``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

Point = tuple[float, float]


def normalize_angle(angle: float) -> float:
    """Map ``angle`` into ``(-pi, pi]``.

    Example:
        >>> normalize_angle(-math.pi) == math.pi
        True
        >>> round(normalize_angle(3 * math.pi / 2), 12) == round(-math.pi / 2, 12)
        True
    """
    wrapped = math.fmod(angle + math.pi, 2.0 * math.pi)
    if wrapped <= 0.0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi


@dataclass(frozen=True, slots=True)
class Pose:
    """Position in meters and heading in radians, normalised on construction."""

    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta", normalize_angle(self.theta))

    @property
    def position(self) -> Point:
        return (self.x, self.y)

    def distance_to(self, point: Point) -> float:
        return math.hypot(point[0] - self.x, point[1] - self.y)

    def bearing_to(self, point: Point) -> float:
        """Heading that would face ``point``."""
        return math.atan2(point[1] - self.y, point[0] - self.x)

    def facing(self, point: Point) -> Pose:
        return Pose(self.x, self.y, self.bearing_to(point))

    def as_dict(self) -> dict[str, float]:
        return {"x": self.x, "y": self.y, "theta": self.theta}


def angle_between(a: float, b: float) -> float:
    """Absolute angular difference in ``[0, pi]``."""
    return abs(normalize_angle(a - b))


__all__ = ["Point", "Pose", "angle_between", "normalize_angle"]

"""Planar geometry over character-offset coordinates.

Points live in a bitext space: ``x`` indexes the original text and ``y``
the translation.  Angles cross every public boundary in degrees.

The scalar and array routines share numpy's ``arctan2`` so that a segment
classified by one is classified identically by the other; ``math.atan2``
disagrees with numpy in the last bit for a few percent of inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .errors import AdomitError, DegenerateSegmentError, NoIntersectionError


class MapPoint(NamedTuple):
    """A corresponding pair of offsets (original ``x``, translation ``y``)."""

    x: float
    y: float


def slope_angle(a, b) -> float:
    """Slope angle of the segment ``a -> b`` in degrees.

    Vertical segments give exactly 90 and horizontal ones exactly 0.  For
    the monotone segments of a bitext map the result lies in [0, 90]; a
    point below ``a`` yields a negative angle, which the triangle search
    relies on.
    """
    dx = b[0] - a[0]
    dy = b[1] - a[1]
    if dx == 0 and dy == 0:
        raise DegenerateSegmentError(f"segment {tuple(a)} -> {tuple(b)} has zero length")
    if dx == 0:
        return 90.0 if dy > 0 else -90.0
    if dy == 0:
        return 0.0
    return float(np.degrees(np.arctan2(float(dy), float(dx))))


def slope_angles(dx, dy) -> np.ndarray:
    """Vectorised :func:`slope_angle` over coordinate differences."""
    dx = np.asarray(dx, dtype=float)
    dy = np.asarray(dy, dtype=float)
    return np.degrees(np.arctan2(dy, dx))


@dataclass(frozen=True)
class Baseline:
    """The line ``y = slope * x + intercept`` lying under a point set."""

    slope: float
    intercept: float

    def __post_init__(self):
        if not self.slope > 0:
            raise AdomitError(f"baseline slope must be positive, got {self.slope}")

    @property
    def angle(self) -> float:
        """Slope angle of the line in degrees."""
        return math.degrees(math.atan(self.slope))

    def offset(self, p) -> float:
        # Same expression as build_baseline uses, so the supporting point
        # compares equal to the intercept exactly.
        return p[1] - self.slope * p[0]

    def contains_above(self, p) -> bool:
        """True when ``p`` lies on or above the line."""
        return self.offset(p) >= self.intercept

    def y_at(self, x: float) -> float:
        return self.slope * x + self.intercept


def build_baseline(points: Iterable, space_width: float, space_height: float) -> Baseline:
    """Line parallel to the main diagonal touching the lowest point of ``points``."""
    if space_width <= 0 or space_height <= 0:
        raise AdomitError("bitext space dimensions must be positive")
    pts = np.asarray(list(points) if not isinstance(points, np.ndarray) else points, dtype=float)
    if pts.size == 0:
        raise AdomitError("cannot build a baseline from an empty point set")
    pts = pts.reshape(-1, 2)
    slope = space_height / space_width
    intercept = float(np.min(pts[:, 1] - slope * pts[:, 0]))
    return Baseline(slope, intercept)


def ray_baseline_intersection(s, t: float, baseline: Baseline) -> MapPoint:
    """Where the ray from ``s`` at slope angle ``t`` degrees meets ``baseline``.

    The ray must rise more slowly than the baseline, otherwise the two never
    meet to the right of ``s``.
    """
    rise = math.tan(math.radians(t))
    if t >= baseline.angle or rise >= baseline.slope:
        raise NoIntersectionError(
            f"a ray at {t} degrees never meets a baseline at {baseline.angle:.6g} degrees; "
            "lower the threshold"
        )
    sx, sy = float(s[0]), float(s[1])
    x = (sy - rise * sx - baseline.intercept) / (baseline.slope - rise)
    return MapPoint(x, sy + (x - sx) * rise)


def in_search_triangle(e, s, t: float, baseline: Baseline) -> bool:
    """Whether ``e`` falls inside the search triangle hanging from ``s``.

    The triangle is bounded by the vertical through ``s``, the baseline, and
    the threshold ray.  The ray itself is excluded, so a candidate exactly at
    angle ``t`` does not qualify.
    """
    if not e[0] > s[0]:
        return False
    if not baseline.contains_above(e):
        return False
    return slope_angle(s, e) < t

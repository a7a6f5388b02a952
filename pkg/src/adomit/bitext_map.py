"""Bitext maps: validated monotone chains of correspondence points.

Map files hold one ``X<TAB>Y`` pair of character offsets per line; blank
lines and lines starting with ``#`` are ignored.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import MapError, MapParseError, MonotonicityError, OutOfBoundsError
from .geometry import MapPoint


class MapSegment(NamedTuple):
    start: MapPoint
    end: MapPoint


class BitextMap:
    """An immutable bitext map over a ``width`` x ``height`` bitext space.

    Points must be strictly increasing in ``x`` and non-decreasing in ``y``.
    Horizontal runs are legal because noisy mappers produce them.  ``notes``
    carries human-readable remarks from normalisation steps such as
    :func:`transpose`.
    """

    __slots__ = ("xs", "ys", "width", "height", "notes")

    def __init__(self, points, width: int, height: int, notes: Sequence[str] = ()):
        arr = np.asarray(points, dtype=np.int64).reshape(-1, 2)
        xs = np.ascontiguousarray(arr[:, 0])
        ys = np.ascontiguousarray(arr[:, 1])
        _validate(xs, ys, width, height)
        xs.flags.writeable = False
        ys.flags.writeable = False
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "width", int(width))
        object.__setattr__(self, "height", int(height))
        object.__setattr__(self, "notes", tuple(notes))

    def __setattr__(self, name, value):
        raise AttributeError("BitextMap is immutable")

    @classmethod
    def from_arrays(cls, xs, ys, width, height, notes=()):
        return cls(np.column_stack([xs, ys]), width, height, notes)

    @property
    def points(self) -> tuple[MapPoint, ...]:
        return tuple(MapPoint(int(x), int(y)) for x, y in zip(self.xs, self.ys))

    @property
    def dropped(self) -> int:
        """Number of points discarded while building this map (see ``notes``)."""
        total = 0
        for note in self.notes:
            if note.startswith("dropped "):
                total += int(note.split()[1])
        return total

    def __len__(self):
        return len(self.xs)

    def __eq__(self, other):
        if not isinstance(other, BitextMap):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and np.array_equal(self.xs, other.xs)
            and np.array_equal(self.ys, other.ys)
        )

    def __hash__(self):
        return hash((self.width, self.height, self.xs.tobytes(), self.ys.tobytes()))

    def __repr__(self):
        return f"BitextMap({len(self)} points, {self.width}x{self.height})"


def _validate(xs, ys, width, height):
    if width <= 0 or height <= 0:
        raise MapError(f"bitext space must have positive size, got {width}x{height}")
    if len(xs) == 0:
        return
    bad = np.flatnonzero((xs < 0) | (ys < 0) | (xs > width) | (ys > height))
    if bad.size:
        k = bad[0]
        raise OutOfBoundsError(
            f"point ({xs[k]}, {ys[k]}) lies outside the bitext space [0, {width}] x [0, {height}]"
        )
    dx = np.diff(xs)
    dy = np.diff(ys)
    bad = np.flatnonzero(dx <= 0)
    if bad.size:
        k = bad[0]
        a, b = (xs[k], ys[k]), (xs[k + 1], ys[k + 1])
        if a == b:
            raise MapError(f"duplicate point ({a[0]}, {a[1]})")
        raise MapError(f"x must increase strictly: ({a[0]}, {a[1]}) then ({b[0]}, {b[1]})")
    bad = np.flatnonzero(dy < 0)
    if bad.size:
        k = bad[0]
        raise MonotonicityError((int(xs[k]), int(ys[k])), (int(xs[k + 1]), int(ys[k + 1])))


def parse_points(lines: Iterable[str]) -> list[tuple[int, int]]:
    """Read raw ``(x, y)`` pairs, reporting the line number of malformed input."""
    points = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n").strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise MapParseError(lineno, f"expected 2 tab-separated fields, found {len(fields)}")
        try:
            x, y = (int(f.strip()) for f in fields)
        except ValueError:
            raise MapParseError(lineno, f"non-integer offset in {line!r}") from None
        points.append((x, y))
    return points


def parse_map(lines: Iterable[str], width: int, height: int) -> BitextMap:
    """Parse a map file body.  Points are sorted by ``x`` and exact duplicates removed."""
    points = sorted(set(parse_points(lines)))
    return BitextMap(points, width, height)


def read_map(path, width=None, height=None) -> BitextMap:
    """Load a map file.  Missing dimensions are taken from the largest offsets."""
    with open(path, encoding="utf-8", newline="") as fh:
        points = sorted(set(parse_points(fh)))
    if width is None:
        width = max((p[0] for p in points), default=0)
    if height is None:
        height = max((p[1] for p in points), default=0)
    if not points:
        return BitextMap(np.empty((0, 2)), max(width, 1), max(height, 1))
    return BitextMap(points, width, height)


def format_map(m: BitextMap) -> str:
    return "".join(f"{x}\t{y}\n" for x, y in zip(m.xs.tolist(), m.ys.tolist()))


def segments(m: BitextMap) -> list[MapSegment]:
    pts = m.points
    return [MapSegment(a, b) for a, b in zip(pts, pts[1:])]


def transpose(m: BitextMap) -> BitextMap:
    """Swap the roles of the two texts.

    A horizontal run in ``m`` turns into several points sharing one abscissa;
    only the one with the largest new ordinate survives, and the number of
    discarded points is recorded in ``notes``.
    """
    new_x = m.ys
    new_y = m.xs
    if len(new_x) == 0:
        return BitextMap(np.empty((0, 2)), m.height, m.width)
    # source is x-sorted with y non-decreasing, so new_x is already sorted;
    # the last of each tie group has the largest original x
    keep = np.ones(len(new_x), dtype=bool)
    keep[:-1] = new_x[1:] != new_x[:-1]
    dropped = int(len(keep) - keep.sum())
    notes = (f"dropped {dropped} point(s) sharing an abscissa after transposition",) if dropped else ()
    return BitextMap.from_arrays(new_x[keep], new_y[keep], m.height, m.width, notes)


def interpolate(m: BitextMap, x):
    """Piecewise-linear map value at ``x``; linear extrapolation past the ends."""
    if len(m) < 2:
        raise MapError("interpolation needs at least 2 points")
    xs = m.xs.astype(float)
    ys = m.ys.astype(float)
    xq = np.asarray(x, dtype=float)
    out = np.interp(xq, xs, ys)
    lo = xq < xs[0]
    hi = xq > xs[-1]
    if np.any(lo):
        slope = (ys[1] - ys[0]) / (xs[1] - xs[0])
        out = np.where(lo, ys[0] + (xq - xs[0]) * slope, out)
    if np.any(hi):
        slope = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
        out = np.where(hi, ys[-1] + (xq - xs[-1]) * slope, out)
    return float(out) if out.ndim == 0 else out


def with_corners(m: BitextMap) -> BitextMap:
    """Add the origin and the far corner of the bitext space.

    A corner is skipped when the map already has a point on that corner's
    abscissa, since adding it would break strict ``x`` ordering.
    """
    xs, ys = m.xs.tolist(), m.ys.tolist()
    if not xs or xs[0] != 0:
        xs.insert(0, 0)
        ys.insert(0, 0)
    if xs[-1] != m.width:
        xs.append(m.width)
        ys.append(m.height)
    return BitextMap.from_arrays(xs, ys, m.width, m.height, m.notes)

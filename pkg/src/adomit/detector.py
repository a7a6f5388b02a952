"""Omission detection over bitext maps.

Two methods are provided.  The basic method flags every pair of adjacent
map points whose slope angle falls below the threshold.  ADOMIT then glues
fragments of one omission back together: starting from each flagged
segment it looks for the rightmost later endpoint that still sits below the
threshold ray and above a diagonal-parallel baseline, and reports the span
between them as one segment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bitext_map import BitextMap, transpose
from .errors import AdomitError, ConfigurationError
from .geometry import Baseline, MapPoint, build_baseline, slope_angle, slope_angles

METHODS = ("basic", "adomit")
AXES = ("translation", "original")

# slack on the "higher than i" stop so rounding in i.y never ends a scan early
_STOP_EPS = 1e-9


@dataclass(frozen=True)
class OmittedSegment:
    """A flagged stretch of the map.

    ``start`` and ``end`` are in the map's own coordinates (original text on
    x).  ``length`` counts characters along the axis of the text that has
    no counterpart, and ``angle`` is measured in the orientation where the
    omission is horizontal.
    """

    start: MapPoint
    end: MapPoint
    axis: str
    length: int
    angle: float


@dataclass(frozen=True)
class DetectionReport:
    segments: tuple[OmittedSegment, ...]
    threshold_degrees: float
    method: str
    axis: str

    def __len__(self):
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)


def _check_threshold(t):
    if not 0 < t < 90:
        raise ConfigurationError(f"threshold must lie strictly between 0 and 90 degrees, got {t}")


def _segment(start, end, axis) -> OmittedSegment:
    start = MapPoint(*start)
    end = MapPoint(*end)
    return OmittedSegment(start, end, axis, int(end.x - start.x), slope_angle(start, end))


def _minimal_index(m: BitextMap, t: float):
    """Indices of map points that start a below-threshold step, and all step angles."""
    angles = slope_angles(np.diff(m.xs), np.diff(m.ys))
    return np.flatnonzero(angles < t), angles


def _make_minimal(xs, ys, idx, angles, axis="translation") -> list[OmittedSegment]:
    # plain Python scalars: building tens of thousands of segments from numpy
    # scalars costs more than the detection itself
    x0, y0 = xs[idx].tolist(), ys[idx].tolist()
    x1, y1 = xs[idx + 1].tolist(), ys[idx + 1].tolist()
    return [
        OmittedSegment(MapPoint(a, b), MapPoint(c, d), axis, c - a, ang)
        for a, b, c, d, ang in zip(x0, y0, x1, y1, angles[idx].tolist())
    ]


def minimal_omitted_segments(m: BitextMap, t: float) -> list[OmittedSegment]:
    """Adjacent-point segments with slope angle strictly below ``t``, in x order."""
    _check_threshold(t)
    if len(m) < 2:
        return []
    idx, angles = _minimal_index(m, t)
    return _make_minimal(m.xs, m.ys, idx, angles)


def baseline_for(minimal: Sequence[OmittedSegment], m: BitextMap) -> Baseline:
    """Diagonal-parallel baseline under every endpoint of ``minimal``."""
    pts = [p for seg in minimal for p in (seg.start, seg.end)]
    return build_baseline(pts, m.width, m.height)


def _check_steepness(t, baseline):
    if t >= baseline.angle:
        raise ConfigurationError(
            f"threshold {t} degrees is at least as steep as the main diagonal "
            f"({baseline.angle:.2f} degrees); lower the threshold"
        )


def _merge_spans(sx, sy, ex, ey, t, baseline) -> list[tuple[int, int]]:
    """Greedy triangle search over endpoint arrays; returns (first, last) index pairs."""
    n = len(sx)
    if np.any(np.diff(sx) < 0):
        raise AdomitError("minimal segments must be sorted by left endpoint")
    if np.any(np.diff(ey) < 0):
        raise AdomitError("right endpoints of minimal segments must not descend")
    above = (ey - baseline.slope * ex) >= baseline.intercept

    # apex of every search triangle at once; same arithmetic as
    # ray_baseline_intersection, elementwise
    rise = math.tan(math.radians(t))
    apex_x = (sy - rise * sx - baseline.intercept) / (baseline.slope - rise)
    apex_y = sy + (apex_x - sx) * rise
    # right endpoints ascend, so the first one higher than the apex ends the search
    stops = np.searchsorted(ey, apex_y + _STOP_EPS * np.maximum(1.0, np.abs(apex_y)), side="right").tolist()

    spans = []
    k = 0
    while k < n:
        stop = stops[k]
        best = k
        if stop > k + 1:
            x0, y0 = sx[k], sy[k]
            wx = ex[k:stop]
            inside = (wx > x0) & above[k:stop] & (slope_angles(wx - x0, ey[k:stop] - y0) < t)
            hits = np.flatnonzero(inside)
            if hits.size:
                best = max(best, k + int(hits[-1]))
        spans.append((k, best))
        k = best + 1
    return spans


def reconstruct_maximal(
    minimal: Sequence[OmittedSegment], t: float, baseline: Baseline
) -> list[OmittedSegment]:
    """Merge fragmented minimal segments into maximal omitted segments.

    ``minimal`` must be sorted by left endpoint and, as for any segments cut
    from one bitext map, have right endpoints with non-decreasing ordinates.
    Every endpoint must lie on or above ``baseline``.  Output segments are
    disjoint; the scan resumes after the end of each emitted segment.
    """
    _check_threshold(t)
    if not minimal:
        return []
    _check_steepness(t, baseline)
    sx = np.array([seg.start.x for seg in minimal], dtype=float)
    sy = np.array([seg.start.y for seg in minimal], dtype=float)
    ex = np.array([seg.end.x for seg in minimal], dtype=float)
    ey = np.array([seg.end.y for seg in minimal], dtype=float)
    axis = minimal[0].axis
    return [
        minimal[k] if k == j else _segment(minimal[k].start, minimal[j].end, axis)
        for k, j in _merge_spans(sx, sy, ex, ey, t, baseline)
    ]


def reconstruct_maximal_bruteforce(
    minimal: Sequence[OmittedSegment], t: float
) -> list[OmittedSegment]:
    """Reference for :func:`reconstruct_maximal` testing every pair of segments.

    Roughly n^2/2 angle comparisons and no geometry beyond the slope angle.
    Selection is the same greedy disjoint cover: from the leftmost unused
    segment, extend to the rightmost end reachable below the threshold.
    """
    n = len(minimal)
    reach = []
    for a in range(n):
        last = a
        for b in range(a, n):
            if slope_angle(minimal[a].start, minimal[b].end) < t:
                last = b
        reach.append(last)
    out = []
    k = 0
    while k < n:
        j = reach[k]
        if j == k:
            out.append(minimal[k])
        else:
            out.append(_segment(minimal[k].start, minimal[j].end, minimal[k].axis))
        k = j + 1
    return out


def sort_segments(segs) -> tuple[OmittedSegment, ...]:
    """Longest first; equal lengths by start abscissa in detection orientation."""
    def key(seg):
        origin = seg.start.x if seg.axis == "translation" else seg.start.y
        return (-seg.length, origin)

    return tuple(sorted(segs, key=key))


def _detect_horizontal(m, t, method):
    if len(m) < 2:
        return []
    idx, angles = _minimal_index(m, t)
    if method == "basic" or idx.size == 0:
        return _make_minimal(m.xs, m.ys, idx, angles)
    # ADOMIT works on coordinate arrays and only builds the segments it reports
    sx, sy = m.xs[idx].astype(float), m.ys[idx].astype(float)
    ex, ey = m.xs[idx + 1].astype(float), m.ys[idx + 1].astype(float)
    ends = np.column_stack([np.concatenate([sx, ex]), np.concatenate([sy, ey])])
    baseline = build_baseline(ends, m.width, m.height)
    _check_steepness(t, baseline)
    xs, ys, first = m.xs.tolist(), m.ys.tolist(), idx.tolist()
    out = []
    for k, j in _merge_spans(sx, sy, ex, ey, t, baseline):
        a, b = first[k], first[j] + 1
        start, end = MapPoint(xs[a], ys[a]), MapPoint(xs[b], ys[b])
        if k == j:
            out.append(OmittedSegment(start, end, "translation", end.x - start.x, float(angles[a])))
        else:
            out.append(_segment(start, end, "translation"))
    return out


def detect(
    m: BitextMap,
    t: float = 37.0,
    method: str = "adomit",
    axis: str = "translation",
    min_length: int = 0,
) -> DetectionReport:
    """Run one detection pass and return the sorted report.

    ``axis="translation"`` finds text of the original that is missing from
    the translation (horizontal stretches).  ``axis="original"`` finds the
    converse by working on the transposed map; the reported points are
    mapped back to the input's coordinates.
    """
    _check_threshold(t)
    if method not in METHODS:
        raise ConfigurationError(f"unknown method {method!r}; expected one of {METHODS}")
    if axis not in AXES:
        raise ConfigurationError(f"unknown axis {axis!r}; expected one of {AXES}")
    if axis == "translation":
        found = _detect_horizontal(m, t, method)
    else:
        found = [
            OmittedSegment(
                MapPoint(seg.start.y, seg.start.x),
                MapPoint(seg.end.y, seg.end.x),
                "original",
                seg.length,
                seg.angle,
            )
            for seg in _detect_horizontal(transpose(m), t, method)
        ]
    found = [seg for seg in found if seg.length >= min_length]
    return DetectionReport(sort_segments(found), float(t), method, axis)

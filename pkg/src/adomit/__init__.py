"""Detect omissions in translations by analysing bitext maps geometrically."""

from .bitext_map import BitextMap, MapSegment, interpolate, parse_map, read_map, segments, transpose
from .detector import (
    DetectionReport,
    OmittedSegment,
    detect,
    minimal_omitted_segments,
    reconstruct_maximal,
    reconstruct_maximal_bruteforce,
)
from .errors import AdomitError
from .geometry import (
    Baseline,
    MapPoint,
    build_baseline,
    in_search_triangle,
    ray_baseline_intersection,
    slope_angle,
)

__version__ = "0.1.0"

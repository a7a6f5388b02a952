import math

import numpy as np
import pytest

from adomit.bitext_map import BitextMap
from adomit.detector import (
    baseline_for,
    detect,
    minimal_omitted_segments,
    reconstruct_maximal,
    reconstruct_maximal_bruteforce,
    sort_segments,
)
from adomit.errors import AdomitError, ConfigurationError
from adomit.geometry import Baseline, slope_angle

from conftest import HANSARD_EASY_15, random_instance, random_monotone_map


def ends(segs):
    return [(tuple(s.start), tuple(s.end)) for s in segs]


@pytest.fixture
def fragmented():
    # one omission broken by the steep interfering step (100,1) -> (110,11)
    return BitextMap([(0, 0), (100, 1), (110, 11), (200, 12)], 200, 200)


@pytest.fixture
def one_jump():
    # clean diagonal with a single 553-character horizontal jump
    return BitextMap(
        [(0, 0), (500, 500), (1000, 1000), (1553, 1000), (2000, 1447), (2553, 2000)], 2553, 2000
    )


def test_minimal_simple():
    m = BitextMap([(0, 0), (100, 1), (200, 101)], 200, 101)
    segs = minimal_omitted_segments(m, 15)
    assert ends(segs) == [((0, 0), (100, 1))]
    assert segs[0].angle == pytest.approx(math.degrees(math.atan(0.01)))
    assert segs[0].length == 100


def test_minimal_none_below_threshold():
    m = BitextMap([(0, 0), (10, 10), (20, 30)], 20, 30)
    assert minimal_omitted_segments(m, 15) == []


def test_minimal_hansard_list(hansard_map):
    segs = minimal_omitted_segments(hansard_map, 15)
    assert ends(segs) == [(a, b) for a, b in HANSARD_EASY_15]
    assert ((211071, 230935), (211379, 231007)) in ends(segs)
    # nine survive at 10 degrees and eight at 5
    assert len(minimal_omitted_segments(hansard_map, 10)) == 9
    assert len(minimal_omitted_segments(hansard_map, 5)) == 8


def test_reconstruct_single():
    m = BitextMap([(0, 0), (100, 1), (200, 300)], 200, 300)
    minimal = minimal_omitted_segments(m, 15)
    assert reconstruct_maximal(minimal, 15, baseline_for(minimal, m)) == minimal


def test_reconstruct_across_interfering_segment(fragmented):
    minimal = minimal_omitted_segments(fragmented, 15)
    assert len(minimal) == 2
    assert slope_angle((0, 0), (200, 12)) < 15
    out = reconstruct_maximal(minimal, 15, Baseline(1.0, -200.0))
    assert ends(out) == [((0, 0), (200, 12))]
    assert out[0].length == 200


def test_reconstruct_rejects_steep_threshold(fragmented):
    minimal = minimal_omitted_segments(fragmented, 44)
    with pytest.raises(ConfigurationError):
        reconstruct_maximal(minimal, 45, Baseline(1.0, -200.0))


def test_reconstruct_rejects_unsorted(fragmented):
    minimal = minimal_omitted_segments(fragmented, 15)
    with pytest.raises(AdomitError):
        reconstruct_maximal(minimal[::-1], 15, Baseline(1.0, -200.0))


def test_fast_search_matches_bruteforce(rng):
    merged = 0
    for _ in range(300):
        minimal, t, base = random_instance(rng)
        fast = reconstruct_maximal(minimal, t, base)
        assert fast == reconstruct_maximal_bruteforce(minimal, t)
        merged += len(fast) < len(minimal)
    # the instances must actually exercise merging
    assert merged > 50


def test_adomit_output_properties(rng):
    for _ in range(200):
        minimal, t, base = random_instance(rng)
        out = reconstruct_maximal(minimal, t, base)
        for seg in out:
            assert slope_angle(seg.start, seg.end) < t
        for a, b in zip(out, out[1:]):
            assert a.end.x <= b.start.x
        # every minimal segment lies inside exactly one output segment
        for seg in minimal:
            owners = [o for o in out if o.start.x <= seg.start.x and seg.end.x <= o.end.x]
            assert len(owners) == 1


def test_detect_matches_segment_pipeline(rng):
    for _ in range(100):
        m = random_monotone_map(rng, int(rng.integers(2, 300)))
        t = float(rng.uniform(5, 20))
        minimal = minimal_omitted_segments(m, t)
        if not minimal or t >= baseline_for(minimal, m).angle:
            continue
        expected = sort_segments(reconstruct_maximal(minimal, t, baseline_for(minimal, m)))
        assert detect(m, t, "adomit").segments == expected


def test_detect_single_jump(one_jump):
    for method in ("basic", "adomit"):
        report = detect(one_jump, 15, method)
        assert [s.length for s in report] == [553]
        assert ends(report) == [((1000, 1000), (1553, 1000))]
        assert report.method == method and report.axis == "translation"
    assert len(detect(one_jump, 15, axis="original")) == 0


def test_detect_original_axis():
    # 300 characters of translation with no counterpart in the original
    m = BitextMap([(0, 0), (500, 500), (500 + 1, 800 + 1), (1000, 1300)], 1000, 1300)
    report = detect(m, 15, "adomit", axis="original")
    assert len(report) == 1
    seg = report.segments[0]
    assert (tuple(seg.start), tuple(seg.end)) == ((500, 500), (501, 801))
    assert seg.axis == "original" and seg.length == 301
    assert len(detect(m, 15, axis="translation")) == 0


def test_detect_fragmented(fragmented):
    basic = detect(fragmented, 15, "basic")
    adomit = detect(fragmented, 15, "adomit")
    assert [s.length for s in basic] == [100, 90]
    assert [s.length for s in adomit] == [200]
    assert max(s.length for s in adomit) >= max(s.length for s in basic)


def test_detect_sorting_and_min_length():
    m = BitextMap(
        [(0, 0), (50, 1), (100, 60), (150, 61), (200, 120), (300, 121), (400, 240)], 400, 440
    )
    report = detect(m, 15, "basic")
    assert [(s.length, s.start.x) for s in report] == [(100, 200), (50, 0), (50, 100)]
    assert [s.length for s in detect(m, 15, "basic", min_length=60)] == [100]


def test_detect_invalid_arguments(one_jump):
    with pytest.raises(ConfigurationError):
        detect(one_jump, 0)
    with pytest.raises(ConfigurationError):
        detect(one_jump, 90)
    with pytest.raises(ConfigurationError):
        detect(one_jump, 15, method="other")
    with pytest.raises(ConfigurationError):
        detect(one_jump, 15, axis="sideways")


def test_detect_reported_angles_below_threshold(rng):
    for _ in range(50):
        m = random_monotone_map(rng, 200)
        t = float(rng.uniform(5, 40))
        if t >= math.degrees(math.atan(m.height / m.width)):
            continue
        for method in ("basic", "adomit"):
            for seg in detect(m, t, method):
                assert slope_angle(seg.start, seg.end) < t
                assert seg.length > 0

"""Simulated evaluation of omission detection.

Each trial builds a synthetic gold map, deletes spans from the translation,
degrades the resulting map with parametric noise in place of a real bitext
mapper, runs the detectors, and labels the sorted report against the known
omissions.  Recall is read off the label sequence at the first run of ``k``
consecutive false alarms, modelling a translator who gives up after ``k``
misses in a row.

The noise model is synthetic, so absolute recall values are not comparable
with results obtained on maps from a real mapper; only relative behaviour
(clean maps, basic vs. ADOMIT) carries over.
"""

from __future__ import annotations

import bisect
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from .bitext_map import BitextMap, interpolate, transpose
from .detector import METHODS, DetectionReport, detect
from .errors import AdomitError, ConfigurationError, PlacementError

log = logging.getLogger(__name__)

SLOPE_RATIO = 1.103
SENTENCE_LENGTH = 139
PARAGRAPH_LENGTH = 553
DEFAULT_WIDTH = 700_000
MAX_PLACEMENT_ATTEMPTS = 10**6

# spurious near-horizontal pairs: x-extent is MIN + exponential(MEAN), capped at MAX
SPURIOUS_MIN_WIDTH = 10
SPURIOUS_MEAN_WIDTH = 50
SPURIOUS_MAX_WIDTH = 1000
# clearance between a spurious pair and any true omission
SPURIOUS_MARGIN = 50


@dataclass(frozen=True)
class Omission:
    """A span deleted from the translation and its counterpart in the original.

    ``y_start``/``y_end`` are offsets in the unmodified translation;
    ``x_start``/``x_end`` delimit the original text that lost its
    translation (the true omitted segment).
    """

    y_start: int
    y_end: int
    x_start: int
    x_end: int

    @property
    def length(self) -> int:
        return self.y_end - self.y_start


@dataclass(frozen=True)
class NoiseParams:
    """Knobs for the synthetic map noise.

    ``interfere_prob`` is the chance that an omission is broken up by
    extraneous points and ``interfere_count`` the number of interfering
    steps put into it.  ``jitter_sigma`` is the standard deviation, in
    characters, of vertical jitter on ordinary map points.
    ``spurious_rate`` is the expected number of false near-horizontal point
    pairs per 100k characters of original text.
    """

    interfere_prob: float = 0.0
    interfere_count: int = 0
    jitter_sigma: float = 0.0
    spurious_rate: float = 0.0

    def __post_init__(self):
        if not 0 <= self.interfere_prob <= 1:
            raise ConfigurationError("interfere_prob must lie in [0, 1]")
        if self.interfere_count < 0:
            raise ConfigurationError("interfere_count must be non-negative")
        if self.jitter_sigma < 0:
            raise ConfigurationError("jitter_sigma must be non-negative")
        if self.spurious_rate < 0:
            raise ConfigurationError("spurious_rate must be non-negative")


DEFAULT_NOISE = NoiseParams(interfere_prob=0.8, interfere_count=8, jitter_sigma=10.0, spurious_rate=20.0)


# -- map synthesis ----------------------------------------------------------


def generate_gold_map(
    width: int = DEFAULT_WIDTH,
    slope_ratio: float = SLOPE_RATIO,
    mean_spacing: float = SENTENCE_LENGTH,
    jitter: float = 0.0,
    seed=None,
) -> BitextMap:
    """A noise-free map hugging ``y = slope_ratio * x``.

    Point spacing along x is uniform on ``[mean_spacing/2, 3*mean_spacing/2]``.
    Ordinates are rounded to whole characters, perturbed by at most
    ``jitter`` characters, and forced strictly increasing.  The map runs
    from the origin to the far corner.
    """
    if width < 1:
        raise AdomitError("gold map needs a positive width")
    if mean_spacing <= 0:
        raise AdomitError("mean_spacing must be positive")
    rng = np.random.default_rng(seed)
    height = int(round(slope_ratio * width))
    lo = max(1, int(round(mean_spacing / 2)))
    hi = max(lo, int(round(1.5 * mean_spacing)))
    n_draw = int(width / ((lo + hi) / 2) * 1.2) + 16
    xs = np.cumsum(rng.integers(lo, hi + 1, size=n_draw))
    while xs[-1] < width:
        xs = np.concatenate([xs, xs[-1] + np.cumsum(rng.integers(lo, hi + 1, size=n_draw))])
    xs = np.concatenate([[0], xs[xs < width], [width]])
    n = len(xs)
    if n < 2:
        raise AdomitError("parameters yield fewer than 2 map points")
    if height < n - 1:
        raise AdomitError("translation too short for a strictly increasing map at this spacing")
    ys = slope_ratio * xs
    if jitter > 0:
        ys = ys + rng.uniform(-jitter, jitter, size=n)
    ys = np.rint(ys).astype(np.int64)
    ys[0], ys[-1] = 0, height
    steps = np.arange(n)
    ys = np.maximum.accumulate(ys - steps) + steps
    ys = np.minimum(ys, height - (n - 1 - steps))
    return BitextMap.from_arrays(xs, ys, width, height)


def _check_spacing(starts: Sequence[int], length: int, min_gap: int) -> bool:
    return all(b - (a + length) >= min_gap for a, b in zip(starts, starts[1:]))


def place_omissions(height: int, count: int, length: int, min_gap: int, rng) -> list[int]:
    """Uniform random start offsets for ``count`` spans, ``min_gap`` apart."""
    lo, hi = 1, height - length - 1
    if hi < lo:
        raise PlacementError(count, 0, f"translation of {height} characters cannot hold a {length}-character omission")
    starts: list[int] = []
    attempts = 0
    while len(starts) < count:
        attempts += 1
        if attempts > MAX_PLACEMENT_ATTEMPTS:
            raise PlacementError(count, len(starts))
        c = int(rng.integers(lo, hi + 1))
        k = bisect.bisect_left(starts, c)
        if k > 0 and c - (starts[k - 1] + length) < min_gap:
            continue
        if k < len(starts) and starts[k] - (c + length) < min_gap:
            continue
        starts.insert(k, c)
    return starts


def inject_omissions(
    gold: BitextMap,
    count: int = 100,
    length: int = PARAGRAPH_LENGTH,
    min_gap: int = 1000,
    seed=None,
    positions: Sequence[int] | None = None,
) -> tuple[BitextMap, list[Omission]]:
    """Delete ``count`` spans of ``length`` characters from the translation.

    Returns the map a perfect mapper would find between the original and the
    shortened translation: every deletion shows up as a horizontal jump from
    ``(x_start, y)`` to ``(x_end, y)``, and later ordinates drop by the
    deleted length.  ``positions`` fixes the span starts instead of sampling.
    """
    if length < 1:
        raise AdomitError("omission length must be positive")
    if positions is not None:
        starts = sorted(int(p) for p in positions)
        if not _check_spacing(starts, length, min_gap):
            raise PlacementError(len(starts), 0, f"omissions must be spaced at least {min_gap} characters apart")
        if starts and (starts[0] < 1 or starts[-1] + length > gold.height - 1):
            raise PlacementError(len(starts), 0, "omission falls outside the translation")
    else:
        starts = place_omissions(gold.height, count, length, min_gap, np.random.default_rng(seed))

    inverse = transpose(gold)
    ys0 = np.array(starts, dtype=float)
    x_lo = np.rint(interpolate(inverse, ys0)).astype(np.int64)
    x_hi = np.rint(interpolate(inverse, ys0 + length)).astype(np.int64)
    omissions = [
        Omission(int(a), int(a) + length, int(b), int(c)) for a, b, c in zip(starts, x_lo, x_hi)
    ]
    for om in omissions:
        if om.x_end <= om.x_start:
            raise AdomitError(f"omission at y={om.y_start} projects onto an empty original span")

    xs, ys = gold.xs, gold.ys
    keep = np.ones(len(xs), dtype=bool)
    for om in omissions:
        keep &= ~((xs >= om.x_start) & (xs <= om.x_end))
        keep &= ~((ys >= om.y_start) & (ys <= om.y_end))
    new_x = [xs[keep]]
    new_y = [ys[keep] - length * np.searchsorted(np.array([om.y_end for om in omissions]), ys[keep], side="left")]
    for j, om in enumerate(omissions):
        y = om.y_start - j * length
        new_x.append(np.array([om.x_start, om.x_end]))
        new_y.append(np.array([y, y]))
    px = np.concatenate(new_x)
    py = np.concatenate(new_y)
    order = np.argsort(px, kind="stable")
    modified = BitextMap.from_arrays(px[order], py[order], gold.width, gold.height - length * len(omissions))
    return modified, omissions


def synthesize_noisy_map(
    modified: BitextMap, omissions: Sequence[Omission], params: NoiseParams, seed=None
) -> BitextMap:
    """Degrade a perfect map the way a real bitext mapper would.

    Three effects, applied in order:

    * interference: an afflicted omission gets ``interfere_count`` one-char
      steps inside its jump.  Each step is a 45-degree segment between two
      extraneous points, so the jump falls apart into flat fragments
      separated by steep interfering segments, and the jump's far end rises
      by the number of steps.
    * jitter: Gaussian vertical noise on every ordinary point, clamped so
      the map stays monotone.
    * spurious pairs: near-horizontal point pairs dropped into stretches
      with no omission; they look exactly like omissions to a detector.
    """
    rng = np.random.default_rng(seed)
    xs = modified.xs.tolist()
    ys = modified.ys.tolist()
    n = len(xs)
    fixed = [False] * n
    if n:
        fixed[0] = fixed[-1] = True

    # (a) interference
    index = {x: i for i, x in enumerate(xs)}
    inserts: dict[int, list[tuple[int, int]]] = {}
    for om in omissions:
        i0 = index.get(om.x_start)
        i1 = index.get(om.x_end)
        if i0 is None or i1 is None or i1 != i0 + 1:
            raise AdomitError(f"map has no jump for the omission at x={om.x_start}")
        fixed[i0] = fixed[i1] = True
        if not (params.interfere_count > 0 and rng.random() < params.interfere_prob):
            continue
        y0 = ys[i0]
        room = ys[i1 + 1] - ys[i1] if i1 + 1 < n else 0
        slots = (om.x_end - om.x_start - 1) // 2
        k = min(params.interfere_count, room, slots)
        if k <= 0:
            continue
        picks = np.sort(rng.choice(slots, size=k, replace=False))
        pts = []
        for j, g in enumerate(picks.tolist(), start=1):
            a = om.x_start + 1 + 2 * g
            pts += [(a, y0 + j - 1), (a + 1, y0 + j)]
        inserts[i0] = pts
        ys[i1] = y0 + k

    # (b) jitter on ordinary points
    if params.jitter_sigma > 0 and n > 2:
        y = np.array(ys, dtype=np.int64)
        fx = np.array(fixed)
        noisy = y + np.rint(rng.normal(0.0, params.jitter_sigma, size=n)).astype(np.int64)
        pos = np.arange(n)
        left = np.maximum.accumulate(np.where(fx, pos, 0))
        right = np.minimum.accumulate(np.where(fx, pos, n - 1)[::-1])[::-1]
        lower, upper = y[left], y[right]
        noisy = np.where(fx, y, np.clip(noisy, lower, upper))
        ys = np.maximum.accumulate(noisy).tolist()

    px, py = [], []
    for i in range(n):
        px.append(xs[i])
        py.append(ys[i])
        for a, b in inserts.get(i, ()):
            px.append(a)
            py.append(b)

    # (c) spurious near-horizontal pairs away from the true omissions
    if params.spurious_rate > 0 and len(px) >= 2:
        expected = params.spurious_rate * modified.width / 1e5
        wanted = int(rng.poisson(expected))
        blocked = sorted(
            (om.x_start - SPURIOUS_MARGIN, om.x_end + SPURIOUS_MARGIN) for om in omissions
        )
        placed = 0
        attempts = 0
        while placed < wanted and attempts < 100 * (wanted + 1):
            attempts += 1
            w = min(SPURIOUS_MAX_WIDTH, SPURIOUS_MIN_WIDTH + int(rng.exponential(SPURIOUS_MEAN_WIDTH)))
            a = int(rng.integers(1, max(2, modified.width - w)))
            b = a + w
            if b >= modified.width:
                continue
            k = bisect.bisect_left(blocked, (a, a))
            if (k > 0 and blocked[k - 1][1] >= a) or (k < len(blocked) and blocked[k][0] <= b):
                continue
            lo = bisect.bisect_left(px, a)
            hi = bisect.bisect_right(px, b)
            if lo == 0 or hi >= len(px):
                continue
            # map ordinate at a, rounded down so the previous point stays below
            xa = px[lo - 1]
            ya = py[lo - 1] + (py[lo] - py[lo - 1]) * (a - xa) // (px[lo] - xa)
            rise = int(rng.integers(0, max(1, w // 20) + 1))
            yb = min(ya + rise, py[hi])
            px[lo:hi] = [a, b]
            py[lo:hi] = [ya, yb]
            bisect.insort(blocked, (a, b))
            placed += 1
        if placed < wanted:
            log.debug("placed %d of %d spurious pairs", placed, wanted)

    return BitextMap.from_arrays(px, py, modified.width, modified.height)


# -- scoring ----------------------------------------------------------------


def score(report: DetectionReport | Iterable, truth: Sequence[Omission]) -> list[frozenset]:
    """Label each flagged segment, in rank order, with the omissions it overlaps.

    Ranges are half-open on the original-text axis, so segments that merely
    touch do not overlap.  An empty set is a false alarm.
    """
    ordered = sorted(range(len(truth)), key=lambda j: truth[j].x_start)
    starts = [truth[j].x_start for j in ordered]
    ends = [truth[j].x_end for j in ordered]
    labels = []
    for seg in report:
        a, b = _x_range(seg)
        hits = set()
        k = bisect.bisect_left(starts, b)  # truths starting before b
        j = k - 1
        # truths are disjoint, so ends ascend with starts
        while j >= 0 and ends[j] > a:
            hits.add(ordered[j])
            j -= 1
        labels.append(frozenset(hits))
    return labels


def _x_range(seg):
    if seg.axis == "translation":
        return seg.start.x, seg.end.x
    return min(seg.start.x, seg.end.x), max(seg.start.x, seg.end.x)


def patience_recall(pattern: Sequence, truth_count: int = 100, k: int = 3) -> float:
    """Recall of a reader who stops at the first ``k`` false alarms in a row.

    ``pattern`` items are either booleans or sets of matched omission ids
    as returned by :func:`score`.  With sets, an omission hit by several
    flagged segments is counted once.  A bare ``True`` counts as one
    distinct omission.
    """
    if k < 1:
        raise ConfigurationError("patience must be at least 1")
    if truth_count <= 0:
        raise ConfigurationError("truth_count must be positive")
    found: set = set()
    bare = 0
    misses = 0
    for item in pattern:
        if isinstance(item, (bool, np.bool_)):
            hit = bool(item)
            if hit:
                bare += 1
        else:
            hit = bool(item)
            found |= item
        if hit:
            misses = 0
        else:
            misses += 1
            if misses == k:
                break
    return min(1.0, (bare + len(found)) / truth_count)


def precision(pattern: Sequence) -> float | None:
    if not pattern:
        return None
    return sum(1 for item in pattern if item) / len(pattern)


# -- experiments ------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    lengths: tuple[int, ...] = (SENTENCE_LENGTH, PARAGRAPH_LENGTH)
    methods: tuple[str, ...] = METHODS
    threshold_degrees: float = 37.0
    trials: int = 10
    seed: int = 0
    noise: NoiseParams = field(default_factory=lambda: DEFAULT_NOISE)
    count: int = 100
    min_gap: int = 1000
    width: int = DEFAULT_WIDTH
    slope_ratio: float = SLOPE_RATIO
    mean_spacing: float = SENTENCE_LENGTH
    gold_jitter: float = 0.0
    patience: tuple[int, ...] = (3, 4, 5)

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigurationError("trials must be at least 1")
        if not 0 < self.threshold_degrees < 90:
            raise ConfigurationError("threshold_degrees must lie in (0, 90)")
        for m in self.methods:
            if m not in METHODS:
                raise ConfigurationError(f"unknown method {m!r}")
        if not self.lengths or not self.methods or not self.patience:
            raise ConfigurationError("lengths, methods and patience must be non-empty")
        if min(self.patience) < 1:
            raise ConfigurationError("patience levels must be at least 1")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        kwargs = {}
        aliases = {"length": "lengths", "method": "methods", "t": "threshold_degrees"}
        known = {f for f in cls.__dataclass_fields__}
        for key, value in data.items():
            name = aliases.get(key, key)
            if name not in known:
                raise ConfigurationError(f"unknown config key {key!r}")
            if name == "noise":
                try:
                    value = NoiseParams(**value)
                except TypeError as exc:
                    raise ConfigurationError(f"bad noise section: {exc}") from None
            elif name in ("lengths", "methods", "patience"):
                value = tuple(value) if isinstance(value, (list, tuple)) else (value,)
            kwargs[name] = value
        return cls(**kwargs)

    def to_dict(self) -> dict:
        d = asdict(self)
        for k in ("lengths", "methods", "patience"):
            d[k] = list(d[k])
        return d


@dataclass(frozen=True)
class TrialResult:
    method: str
    length: int
    trial: int
    seed: int
    pattern: tuple[bool, ...]
    recall_at_patience: dict
    precision: float | None
    matches: tuple[frozenset, ...] = ()


@dataclass(frozen=True)
class Summary:
    method: str
    length: int
    patience: int
    mean_recall: float
    ci_low: float | None
    ci_high: float | None
    trials: int

    @property
    def degenerate(self) -> bool:
        return self.ci_low is None


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    trial_seeds: tuple[int, ...]
    trials: tuple[TrialResult, ...]
    summaries: tuple[Summary, ...]


def trial_seeds(seed: int, trials: int) -> tuple[int, ...]:
    return tuple(int(s) for s in np.random.SeedSequence(seed).generate_state(trials))


def simulate_trial(config: ExperimentConfig, length: int, trial_seed: int):
    """Gold map, omissions and noisy map for one trial; shared by all methods."""
    gold = generate_gold_map(
        config.width,
        config.slope_ratio,
        config.mean_spacing,
        config.gold_jitter,
        seed=np.random.SeedSequence([trial_seed, 0]),
    )
    modified, truth = inject_omissions(
        gold, config.count, length, config.min_gap, seed=np.random.SeedSequence([trial_seed, length, 1])
    )
    noisy = synthesize_noisy_map(
        modified, truth, config.noise, seed=np.random.SeedSequence([trial_seed, length, 2])
    )
    return noisy, truth


def _run_cell(args):
    config, length, trial, seed = args
    noisy, truth = simulate_trial(config, length, seed)
    results = []
    for method in config.methods:
        report = detect(noisy, config.threshold_degrees, method)
        matches = score(report, truth)
        recall = {k: patience_recall(matches, len(truth), k) for k in config.patience}
        results.append(
            TrialResult(
                method,
                length,
                trial,
                seed,
                tuple(bool(m) for m in matches),
                recall,
                precision(matches),
                tuple(matches),
            )
        )
    return results


def confidence_interval(values: Sequence[float], level: float = 0.95):
    """Two-sided Student-t interval for the mean; ``(None, None)`` for one value."""
    n = len(values)
    mean = float(np.mean(values))
    if n < 2:
        return mean, None, None
    sd = float(np.std(values, ddof=1))
    half = float(stats.t.ppf(0.5 + level / 2, n - 1)) * sd / math.sqrt(n)
    return mean, mean - half, mean + half


def run_experiment(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Run every (length, trial) cell and summarise recall per method and patience."""
    seeds = trial_seeds(config.seed, config.trials)
    cells = [(config, length, i, s) for length in config.lengths for i, s in enumerate(seeds)]
    log.info("running %d cells with seeds %s", len(cells), list(seeds))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(_run_cell, cells))
    else:
        batches = [_run_cell(c) for c in cells]
    trials = tuple(r for batch in batches for r in batch)

    summaries = []
    for method in config.methods:
        for length in config.lengths:
            rows = [r for r in trials if r.method == method and r.length == length]
            rows.sort(key=lambda r: r.trial)
            for k in config.patience:
                mean, lo, hi = confidence_interval([r.recall_at_patience[k] for r in rows])
                summaries.append(Summary(method, length, k, mean, lo, hi, len(rows)))
    return ExperimentResult(config, seeds, trials, tuple(summaries))


def sweep(config: ExperimentConfig, thresholds: Sequence[float], workers: int = 1) -> list[ExperimentResult]:
    if not thresholds:
        raise ConfigurationError("threshold list is empty")
    return [run_experiment(replace(config, threshold_degrees=float(t)), workers) for t in thresholds]

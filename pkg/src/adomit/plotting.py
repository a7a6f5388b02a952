"""Figures for detection reports and simulation results.

Uses the object-oriented matplotlib API with the Agg canvas, so nothing
here touches pyplot's global state or needs a display.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Sequence

from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .bitext_map import BitextMap
from .detector import DetectionReport
from .simulator import ExperimentResult, TrialResult

GOLDEN = (5 ** 0.5 - 1) / 2

# fixed metadata keeps PNG output byte-stable across runs
_PNG_META = {"Software": None}


def _figure(width=6.4, height=None, ncols=1):
    fig = Figure(figsize=(width, height or width * GOLDEN))
    FigureCanvasAgg(fig)
    axes = [fig.add_subplot(1, ncols, i + 1) for i in range(ncols)]
    return fig, axes


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    kwargs = {"metadata": _PNG_META} if path.suffix.lower() == ".png" else {}
    fig.savefig(path, dpi=120, bbox_inches="tight", **kwargs)
    return path


def plot_detection(m: BitextMap, reports: Sequence[DetectionReport], path) -> Path:
    """The bitext map with every flagged segment drawn over it."""
    fig, (ax,) = _figure(7.0)
    ax.plot(m.xs, m.ys, color="0.6", lw=0.8, label="bitext map")
    colors = {"translation": "tab:red", "original": "tab:blue"}
    for report in reports:
        first = True
        for seg in report:
            ax.plot(
                [seg.start.x, seg.end.x],
                [seg.start.y, seg.end.y],
                color=colors[seg.axis],
                lw=2.5,
                label=f"omitted from {seg.axis} ({report.method}, t={report.threshold_degrees:g})" if first else None,
            )
            first = False
    ax.set_xlim(0, m.width)
    ax.set_ylim(0, m.height)
    ax.set_xlabel("original (characters)")
    ax.set_ylabel("translation (characters)")
    ax.legend(loc="upper left", fontsize=8, frameon=False)
    return _save(fig, path)


def plot_recall_curves(result: ExperimentResult, path) -> Path:
    """Mean recall against patience, one panel per method, with 95% intervals."""
    cfg = result.config
    fig, axes = _figure(4.0 * len(cfg.methods), 3.4, ncols=len(cfg.methods))
    for ax, method in zip(axes, cfg.methods):
        for length in cfg.lengths:
            rows = [s for s in result.summaries if s.method == method and s.length == length]
            ks = [s.patience for s in rows]
            means = [s.mean_recall for s in rows]
            if rows and not rows[0].degenerate:
                err = [
                    [s.mean_recall - s.ci_low for s in rows],
                    [s.ci_high - s.mean_recall for s in rows],
                ]
            else:
                err = None
            ax.errorbar(ks, means, yerr=err, marker="o", capsize=3, label=f"length {length}")
        ax.set_title(f"{method}, t={cfg.threshold_degrees:g}")
        ax.set_xlabel("patience (consecutive false omissions)")
        ax.set_xticks(list(cfg.patience))
        ax.set_ylim(-0.02, 1.02)
        ax.legend(fontsize=8, frameon=False)
    axes[0].set_ylabel("mean recall")
    fig.tight_layout()
    return _save(fig, path)


def plot_pattern(trial: TrialResult, path) -> Path:
    """Staircase of true/false counters walking a sorted report."""
    fig, (ax,) = _figure(5.0)
    t = f = 0
    xs, ys = [0], [0]
    for hit in trial.pattern:
        if hit:
            t += 1
        else:
            f += 1
        xs.append(t)
        ys.append(f)
    ax.step(xs, ys, where="post", color="k", lw=1)
    ax.set_xlabel('"true omissions" counter')
    ax.set_ylabel('"false omissions" counter')
    ax.set_title(f"{trial.method}, length {trial.length}, trial {trial.trial}")
    return _save(fig, path)


def plot_sweep(results: Sequence[ExperimentResult], path, patience: int | None = None) -> Path:
    """Mean recall at one patience level against the threshold."""
    cfg = results[0].config
    k = patience or cfg.patience[0]
    fig, (ax,) = _figure(6.0)
    ts = [r.config.threshold_degrees for r in results]
    for method in cfg.methods:
        for length in cfg.lengths:
            ys = [
                next(s.mean_recall for s in r.summaries if s.method == method and s.length == length and s.patience == k)
                for r in results
            ]
            ax.plot(ts, ys, marker="o", label=f"{method}, length {length}")
    ax.set_xlabel("slope angle threshold (degrees)")
    ax.set_ylabel(f"mean recall at patience {k}")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(fontsize=8, frameon=False)
    return _save(fig, path)


def write_experiment_figures(result: ExperimentResult, directory) -> list[Path]:
    directory = Path(directory)
    os.makedirs(directory, exist_ok=True)
    t = f"{result.config.threshold_degrees:g}"
    paths = [plot_recall_curves(result, directory / f"recall_t{t}.png")]
    firsts = {}
    for r in result.trials:
        firsts.setdefault((r.method, r.length), r)
    for (method, length), r in sorted(firsts.items()):
        paths.append(plot_pattern(r, directory / f"pattern_{method}_{length}_t{t}.png"))
    return paths

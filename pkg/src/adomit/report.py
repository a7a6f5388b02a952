"""Text and line-delimited JSON renderings of reports and experiment results.

Every renderer is deterministic: identical inputs give identical bytes.
"""

from __future__ import annotations

import json
from typing import Iterable, Sequence

from .detector import DetectionReport
from .simulator import ExperimentResult


def _dumps(record: dict) -> str:
    return json.dumps(record, separators=(", ", ": "), allow_nan=False)


def _fmt_ci(lo, hi) -> str:
    if lo is None:
        return "n/a (single trial)"
    return f"[{lo:.3f}, {hi:.3f}]"


def segment_records(report: DetectionReport) -> list[dict]:
    return [
        {
            "rank": rank,
            "axis": seg.axis,
            "x_start": int(seg.start.x),
            "y_start": int(seg.start.y),
            "x_end": int(seg.end.x),
            "y_end": int(seg.end.y),
            "length": int(seg.length),
            "angle_degrees": round(seg.angle, 6),
            "method": report.method,
            "threshold_degrees": report.threshold_degrees,
        }
        for rank, seg in enumerate(report.segments, start=1)
    ]


def render_report(report: DetectionReport, fmt: str = "text") -> str:
    if fmt == "records":
        return "".join(_dumps(r) + "\n" for r in segment_records(report))
    lines = []
    for r in segment_records(report):
        lines.append(
            f"{r['rank']:>5}  {r['axis']:<11}  ({r['x_start']}, {r['y_start']}) to "
            f"({r['x_end']}, {r['y_end']})  length {r['length']}  angle {r['angle_degrees']:.2f}"
        )
    return "".join(line + "\n" for line in lines)


def summary_records(result: ExperimentResult) -> list[dict]:
    t = result.config.threshold_degrees
    return [
        {
            "type": "summary",
            "method": s.method,
            "length": s.length,
            "patience": s.patience,
            "threshold_degrees": t,
            "mean_recall": round(s.mean_recall, 6),
            "ci_low": None if s.ci_low is None else round(s.ci_low, 6),
            "ci_high": None if s.ci_high is None else round(s.ci_high, 6),
            "ci_degenerate": s.degenerate,
            "trials": s.trials,
        }
        for s in result.summaries
    ]


def trial_records(result: ExperimentResult) -> list[dict]:
    rows = sorted(result.trials, key=lambda r: (r.method, r.length, r.trial))
    return [
        {
            "type": "trial",
            "method": r.method,
            "length": r.length,
            "trial": r.trial,
            "seed": r.seed,
            "threshold_degrees": result.config.threshold_degrees,
            "recall": {str(k): round(v, 6) for k, v in sorted(r.recall_at_patience.items())},
            "precision": None if r.precision is None else round(r.precision, 6),
            "flagged": len(r.pattern),
            "pattern": "".join("T" if p else "F" for p in r.pattern),
        }
        for r in rows
    ]


def render_experiment(result: ExperimentResult, fmt: str = "text", with_trials: bool = True) -> str:
    cfg = result.config
    if fmt == "records":
        header = {"type": "config", **cfg.to_dict(), "trial_seeds": list(result.trial_seeds)}
        records = [header] + summary_records(result)
        if with_trials:
            records += trial_records(result)
        return "".join(_dumps(r) + "\n" for r in records)

    out = [
        f"# threshold {cfg.threshold_degrees:g} deg, {cfg.trials} trial(s), seed {cfg.seed}",
        f"# trial seeds: {' '.join(str(s) for s in result.trial_seeds)}",
    ]
    if cfg.trials < 2:
        out.append("# warning: a single trial gives no confidence interval")
    for method in cfg.methods:
        for length in cfg.lengths:
            out.append("")
            out.append(f"method {method}  omission length {length}")
            out.append(f"  {'patience':>8}  {'mean recall':>11}  95% CI")
            for s in result.summaries:
                if s.method == method and s.length == length:
                    out.append(f"  {s.patience:>8}  {s.mean_recall:>11.3f}  {_fmt_ci(s.ci_low, s.ci_high)}")
    return "\n".join(out) + "\n"


def render_sweep(results: Sequence[ExperimentResult], fmt: str = "text") -> str:
    if fmt == "records":
        lines = []
        for result in results:
            for rec in summary_records(result):
                rec["type"] = "sweep"
                lines.append(_dumps(rec))
        return "".join(line + "\n" for line in lines)
    if not results:
        return ""
    patience = results[0].config.patience
    head = f"{'t':>6}  {'method':<7}  {'length':>6}  " + "  ".join(f"{'recall@' + str(k):>9}" for k in patience)
    out = [head]
    for result in results:
        cfg = result.config
        for method in cfg.methods:
            for length in cfg.lengths:
                vals = {
                    s.patience: s.mean_recall
                    for s in result.summaries
                    if s.method == method and s.length == length
                }
                out.append(
                    f"{cfg.threshold_degrees:>6g}  {method:<7}  {length:>6}  "
                    + "  ".join(f"{vals[k]:>9.3f}" for k in patience)
                )
    return "\n".join(out) + "\n"

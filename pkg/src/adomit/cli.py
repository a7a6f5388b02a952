"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 input or data error.  Results go to
standard output, diagnostics to standard error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace

from . import __version__
from .bitext_map import BitextMap, parse_points, with_corners
from .detector import AXES, METHODS, detect
from .errors import AdomitError, MapParseError
from .report import render_experiment, render_report, render_sweep
from .simulator import ExperimentConfig, run_experiment, sweep

log = logging.getLogger("adomit")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _threshold(value: str) -> float:
    t = float(value)
    if not 0 < t < 90:
        raise argparse.ArgumentTypeError(f"threshold must lie strictly between 0 and 90, got {value}")
    return t


def _threshold_list(value: str) -> list[float]:
    return [_threshold(v) for v in value.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="adomit", description="Find omissions in translations from bitext maps.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def map_args(p):
        p.add_argument("--map", required=True, help="map file, one X<TAB>Y offset pair per line")
        p.add_argument("--width", type=int, help="character length of the original text")
        p.add_argument("--height", type=int, help="character length of the translation")
        p.add_argument(
            "--fit-space",
            action="store_true",
            help="take missing dimensions from the largest offsets in the map",
        )

    p = sub.add_parser("validate", help="check a map file")
    map_args(p)

    p = sub.add_parser("detect", help="list omitted segments, longest first")
    map_args(p)
    p.add_argument("--threshold-degrees", type=_threshold, default=37.0)
    p.add_argument("--method", choices=METHODS, default="adomit")
    p.add_argument("--axis", choices=AXES + ("both",), default="translation")
    p.add_argument("--min-length", type=int, default=0)
    p.add_argument("--format", choices=("text", "records"), default="text")
    p.add_argument("--add-corners", action="store_true", help="add (0,0) and (width,height) to the map")
    p.add_argument("--figure", help="also draw the map and flagged segments to this image file")

    def experiment_args(p):
        p.add_argument("--config", help="experiment configuration (JSON)")
        p.add_argument("--seed", type=int, help="override the configured seed")
        p.add_argument("--trials", type=int, help="override the configured number of trials")
        p.add_argument("--format", choices=("text", "records"), default="text")
        p.add_argument("--workers", type=int, default=1, help="processes used for trials")
        p.add_argument("--figures", help="directory for recall plots")

    p = sub.add_parser("evaluate", help="run the simulated recall experiment")
    experiment_args(p)
    p.add_argument("--threshold-degrees", type=_threshold, help="override the configured threshold")

    p = sub.add_parser("sweep", help="run the experiment at several thresholds")
    experiment_args(p)
    p.add_argument("--thresholds", type=_threshold_list, required=True, help="e.g. 5,10,15,20,25")
    return parser


def _load_map(args) -> BitextMap:
    if (args.width is None or args.height is None) and not args.fit_space:
        raise UsageError("--width and --height are required unless --fit-space is given")
    try:
        with open(args.map, encoding="utf-8", newline="") as fh:
            points = sorted(set(parse_points(fh)))
    except OSError as exc:
        raise AdomitError(exc.strerror or str(exc)) from None
    except UnicodeDecodeError:
        raise AdomitError("not valid UTF-8") from None
    if not points:
        raise AdomitError("no points")
    width = args.width if args.width is not None else max(p[0] for p in points)
    height = args.height if args.height is not None else max(p[1] for p in points)
    return BitextMap(points, width, height)


def _load_config(args) -> ExperimentConfig:
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise AdomitError(exc.strerror or str(exc)) from None
        except json.JSONDecodeError as exc:
            raise AdomitError(f"invalid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise AdomitError("expected a JSON object")
        cfg = ExperimentConfig.from_dict(data)
    else:
        cfg = ExperimentConfig()
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.trials is not None:
        cfg = replace(cfg, trials=args.trials)
    if getattr(args, "threshold_degrees", None) is not None:
        cfg = replace(cfg, threshold_degrees=args.threshold_degrees)
    return cfg


def cmd_validate(args, out) -> int:
    m = _load_map(args)
    out.write(f"ok: {len(m)} points in a {m.width} x {m.height} bitext space\n")
    return EXIT_OK


def cmd_detect(args, out) -> int:
    m = _load_map(args)
    if args.add_corners:
        m = with_corners(m)
    axes = ("translation", "original") if args.axis == "both" else (args.axis,)
    reports = [detect(m, args.threshold_degrees, args.method, axis, args.min_length) for axis in axes]
    for report in reports:
        out.write(render_report(report, args.format))
        log.info("%d omitted segment(s) on the %s axis", len(report), report.axis)
    if args.figure:
        from .plotting import plot_detection

        plot_detection(m, reports, args.figure)
    return EXIT_OK


def cmd_evaluate(args, out) -> int:
    cfg = _load_config(args)
    result = run_experiment(cfg, workers=args.workers)
    out.write(render_experiment(result, args.format))
    if cfg.trials < 2:
        log.warning("only one trial: confidence intervals are undefined")
    if args.figures:
        from .plotting import write_experiment_figures

        write_experiment_figures(result, args.figures)
    return EXIT_OK


def cmd_sweep(args, out) -> int:
    if not args.thresholds:
        raise UsageError("--thresholds needs at least one value")
    cfg = _load_config(args)
    results = sweep(cfg, args.thresholds, workers=args.workers)
    out.write(render_sweep(results, args.format))
    if args.figures:
        from pathlib import Path

        from .plotting import plot_sweep

        for k in cfg.patience:
            plot_sweep(results, Path(args.figures) / f"sweep_patience{k}.png", patience=k)
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "detect": cmd_detect,
    "evaluate": cmd_evaluate,
    "sweep": cmd_sweep,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"adomit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MapParseError as exc:
        print(f"{getattr(args, 'map', '')}:{exc.lineno}: {exc.args[0].split(': ', 1)[1]}", file=sys.stderr)
        return EXIT_DATA
    except AdomitError as exc:
        where = getattr(args, "map", None) or getattr(args, "config", None)
        print(f"{where}: {exc}" if where else f"adomit: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

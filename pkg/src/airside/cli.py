"""Command-line entry points: simulate, calibrate, run, eval.

Exit codes: 0 on success, 1 for usage errors, 2 for data errors. All
diagnostics go to standard error; `eval` prints its statistics as JSON on
standard output.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .fusion import StreamFormatError as RadarFormatError
from .geo import (
    DegenerateGeometryError,
    InsufficientDataError,
    fit_calibration,
    load_correspondences,
    load_model,
    save_model,
)
from .pipeline import PipelineConfig, run_pipeline
from .regions import load_region_graph
from .sim import (
    BrokenRouteError,
    EmptyJoinError,
    estimates_from_analytics_lines,
    evaluate_positions,
    generate,
    load_scenario,
    read_truth,
)
from .tracking import NonMonotoneTimeError, StreamFormatError

USAGE_EXIT = 1
DATA_EXIT = 2

DATA_ERRORS = (
    InsufficientDataError,
    DegenerateGeometryError,
    BrokenRouteError,
    EmptyJoinError,
    NonMonotoneTimeError,
    StreamFormatError,
    RadarFormatError,
    FileNotFoundError,
    json.JSONDecodeError,
    KeyError,
    ValueError,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


def _parse_frame(text: str) -> tuple[float, float]:
    w, _, h = text.partition("x")
    return float(w), float(h)


def cmd_simulate(args) -> int:
    config = load_scenario(args.config)
    result = generate(config, args.out)
    print(f"wrote {result.detections_path.parent}", file=sys.stderr)
    return 0


def cmd_calibrate(args) -> int:
    pixels, geos = load_correspondences(args.pairs)
    width, height = _parse_frame(args.frame)
    model = fit_calibration(pixels, geos, args.degree, (width, height))
    save_model(model, args.out)
    print(
        f"fitted degree {args.degree} on {len(pixels)} pairs, "
        f"rmse {model.fit_rmse_meters:.3f} m",
        file=sys.stderr,
    )
    return 0


def _read_stream(path: str) -> list[str]:
    if path == "-":
        return sys.stdin.read().splitlines()
    return Path(path).read_text().splitlines()


def cmd_run(args) -> int:
    graph = load_region_graph(args.regions)
    model = load_model(args.model)

    file_obj = {}
    if args.config:
        file_obj = json.loads(Path(args.config).read_text())
    config = _merged_pipeline_config(file_obj, args)

    detection_lines = _read_stream(args.detections)
    radar_lines = _read_stream(args.radar) if args.radar else []

    out = Path(args.out) if args.out and args.out != "-" else None
    records = run_pipeline(detection_lines, radar_lines, graph, model, config)
    if out is None:
        for record in records:
            sys.stdout.write(json.dumps(record) + "\n")
    else:
        with out.open("w") as fh:
            for record in records:
                fh.write(json.dumps(record) + "\n")
    return 0


def cmd_eval(args) -> int:
    lines = Path(args.analytics).read_text().splitlines()
    estimates = estimates_from_analytics_lines(lines)
    truth = read_truth(args.truth)
    stats = evaluate_positions(estimates, truth)
    sys.stdout.write(json.dumps(stats) + "\n")
    return 0


_RUN_FLAGS = {
    "iou_gate": ("tracker", "iou_gate", float),
    "center_gate_px": ("tracker", "center_gate_px", float),
    "smoothing_window": ("tracker", "smoothing_window", int),
    "m_confirm": ("tracker", "m_confirm", int),
    "m_drop": ("tracker", "m_drop", int),
    "v_still_kn": ("analytics", "v_still_kn", float),
    "speed_window": ("analytics", "speed_window", int),
    "heading_window": ("analytics", "heading_window", int),
    "fusion_gate_m": ("fusion", "gate_m", float),
    "fusion_window_s": ("fusion", "window_s", float),
    "tick_s": (None, "tick_s", float),
}


def _merged_pipeline_config(file_obj: dict, args) -> PipelineConfig:
    # Precedence: CLI flags > config file > defaults.
    merged = json.loads(json.dumps(file_obj))
    for flag, (section, key, cast) in _RUN_FLAGS.items():
        value = getattr(args, flag, None)
        if value is None:
            continue
        if section is None:
            merged[key] = cast(value)
        else:
            merged.setdefault(section, {})[key] = cast(value)
    return PipelineConfig.from_json_obj(merged)


def build_parser() -> _Parser:
    parser = _Parser(prog="airside", description=__doc__)
    parser.add_argument("--version", action="version", version=f"airside {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="generate a synthetic scenario")
    p_sim.add_argument("--config", required=True, help="scenario config JSON")
    p_sim.add_argument("--out", required=True, help="output directory")
    p_sim.set_defaults(func=cmd_simulate)

    p_cal = sub.add_parser("calibrate", help="fit the pixel-to-geo model")
    p_cal.add_argument("--pairs", required=True, help="correspondence JSON file")
    p_cal.add_argument("--degree", type=int, default=5)
    p_cal.add_argument("--frame", required=True, help="frame size, e.g. 1920x1080")
    p_cal.add_argument("--out", required=True, help="model JSON output path")
    p_cal.set_defaults(func=cmd_calibrate)

    p_run = sub.add_parser("run", help="run the analytics pipeline")
    p_run.add_argument("--regions", required=True)
    p_run.add_argument("--model", required=True)
    p_run.add_argument("--detections", required=True)
    p_run.add_argument("--radar", default=None)
    p_run.add_argument("--out", default=None, help="analytics JSONL (default stdout)")
    p_run.add_argument("--config", default=None, help="pipeline config JSON")
    for flag, (_, _, cast) in _RUN_FLAGS.items():
        p_run.add_argument(f"--{flag.replace('_', '-')}", dest=flag, type=cast, default=None)
    p_run.set_defaults(func=cmd_run)

    p_eval = sub.add_parser("eval", help="score analytics against ground truth")
    p_eval.add_argument("--analytics", required=True)
    p_eval.add_argument("--truth", required=True)
    p_eval.set_defaults(func=cmd_eval)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DATA_ERRORS as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return DATA_EXIT


if __name__ == "__main__":
    sys.exit(main())

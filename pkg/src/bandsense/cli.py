"""Command-line pipeline: simulate, reconstruct, uncertainty, events, evaluate.

All diagnostics go to stderr; data goes to the named output files or stdout.
Every subcommand is deterministic for fixed inputs and seed, including the
output bytes.  A JSON config file may supply any flag (keys are the long
option names with underscores); explicit command-line values win.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import io as bio
from .errors import BandSenseError
from .geometry import RobotGeometry, reconstruct_shape
from .registration import (
    GroundTruthShape,
    position_errors,
    project_to_plane,
    register_first_segment,
    register_first_segment_3d,
)
from .sensing import ThermistorLayout, detect_heat_events
from .sim import run_scenario
from .uncertainty import McConfig, sample_shapes

DEFAULT_GEOMETRY = "0.066,0.076,15"


def _parse_geometry(text: str) -> RobotGeometry:
    parts = text.split(",")
    if len(parts) != 3:
        raise BandSenseError(
            f"--geometry expects 'D,L,N' (meters, meters, count), got {text!r}"
        )
    return RobotGeometry(float(parts[0]), float(parts[1]), int(parts[2]))


def _orientations_at(log, tick: int):
    ticks = log.ticks()
    if not ticks:
        raise BandSenseError("log contains no records")
    if tick < 0:
        tick = ticks[-1]
    if tick not in ticks:
        raise BandSenseError(f"tick {tick} not present in log (has {len(ticks)} ticks)")
    return tick, log.orientations_at_tick(tick)


def _cmd_simulate(args):
    scenario = bio.read_scenario(args.scenario)
    log = run_scenario(scenario)
    bio.write_log(log, args.out)
    missing = sum(1 for r in log.records if r.status == "missing")
    print(
        f"{scenario.tick_count} ticks, {len(log.records)} records, "
        f"{missing} missing -> {args.out}"
    )
    return 0


def _cmd_reconstruct(args):
    log = bio.read_log(args.log)
    geom = _parse_geometry(args.geometry)
    _, orientations = _orientations_at(log, args.tick)
    if len(orientations) != geom.band_count:
        raise BandSenseError(
            f"log has {len(orientations)} bands, geometry declares {geom.band_count}"
        )
    shape = reconstruct_shape(orientations, geom)
    bio.write_shape(shape, args.out)
    max_bend = max((b.theta_rad for b in shape.segment_bends), default=0.0)
    print(f"max segment bend {math.degrees(max_bend):.3f} deg -> {args.out}")
    return 0


def _cmd_uncertainty(args):
    log = bio.read_log(args.log)
    geom = _parse_geometry(args.geometry)
    _, orientations = _orientations_at(log, args.tick)
    cfg = McConfig(
        n_samples=args.samples,
        angle_error_bound_rad=math.radians(args.angle_err_deg),
        vary_bend_location=not args.fixed_bend_location,
        seed=args.seed,
    )
    cloud = sample_shapes(
        orientations, geom, cfg, percentile=args.percentile, workers=args.workers
    )
    bio.write_cloud(cloud, args.out, max_samples=args.max_export)
    worst = max(s.max_radius_m for s in cloud.per_band_stats)
    print(
        f"{cloud.n_samples} samples, {cloud.clamp_count} clamped draws, "
        f"max band radius {worst:.4f} m -> {args.out}"
    )
    return 0


def _cmd_events(args):
    log = bio.read_log(args.log)
    geom = _parse_geometry(args.geometry)
    tick, orientations = _orientations_at(log, args.tick)
    shape = reconstruct_shape(orientations, geom)
    layout = ThermistorLayout()
    grid = [
        [log.thermistor_series(b, ch) for ch in range(layout.count_per_band)]
        for b in range(geom.band_count)
    ]
    events = detect_heat_events(
        grid, layout, shape, args.threshold, args.baseline_window
    )
    if args.out:
        bio.write_events(events, args.out)
        print(f"{len(events)} events -> {args.out}")
    else:
        bio.write_events(events, sys.stdout)
    return 0


def _cmd_evaluate(args):
    est_points, est_kinds = bio.read_shape(args.shape)
    bands = est_points[[k == "band" for k in est_kinds]]
    truth = bio.read_ground_truth(args.truth)
    if args.plane == "xy":
        est2 = project_to_plane(bands, [0.0, 0.0, 1.0])
        tru2 = truth.band_points[:, :2]
        registered = register_first_segment(est2, tru2)
        report = position_errors(registered, tru2)
    else:
        tru = truth.band_points
        if tru.shape[1] == 2:
            raise BandSenseError("3D evaluation needs 3D ground truth; use --plane xy")
        registered = register_first_segment_3d(bands, tru)
        report = position_errors(registered, tru)
    for b, e in enumerate(report.per_band_error_m):
        print(f"band {b}: {e * 100.0:.3f} cm")
    print(
        f"max error {report.max_error_m * 100.0:.3f} cm at band {report.argmax_band}"
    )
    if args.out:
        bio.write_error_report(report, args.out)
    return 0


def _cmd_export_plot(args):
    import os

    os.makedirs(args.out_dir, exist_ok=True)
    wrote = []
    if args.shape:
        points, kinds = bio.read_shape(args.shape)
        path = os.path.join(args.out_dir, "nominal.csv")
        lines = ["kind,x,y,z"] + [
            f"{k}," + ",".join(repr(float(c)) for c in p)
            for k, p in zip(kinds, points)
        ]
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
        wrote.append(path)
    if args.cloud:
        stats, samples = bio.read_cloud(args.cloud)
        path = os.path.join(args.out_dir, "cloud_samples.csv")
        keep = sorted(samples)
        if args.max_export is not None and len(keep) > args.max_export:
            keep = [keep[int(i)] for i in np.linspace(0, len(keep) - 1, args.max_export)]
        lines = ["sample,band,x,y,z"]
        for i in keep:
            for b, p in enumerate(samples[i]):
                lines.append(f"{i},{b}," + ",".join(repr(float(c)) for c in p))
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
        wrote.append(path)
        path = os.path.join(args.out_dir, "cloud_stats.csv")
        lines = ["band,mean_x,mean_y,mean_z,max_radius_m,percentile_radius_m"]
        for b, st in enumerate(stats):
            m = st["mean"]
            lines.append(
                f"{b},{m[0]!r},{m[1]!r},{m[2]!r},"
                f"{st['max_radius_m']!r},{st['percentile_radius_m']!r}"
            )
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
        wrote.append(path)
    if args.truth:
        truth = bio.read_ground_truth(args.truth)
        path = os.path.join(args.out_dir, "truth.csv")
        dim = truth.band_points.shape[1]
        lines = ["kind," + ",".join("xyz"[:dim])]
        for p in truth.band_points:
            lines.append("band," + ",".join(repr(float(c)) for c in p))
        if truth.midpoints is not None:
            for p in truth.midpoints:
                lines.append("mid," + ",".join(repr(float(c)) for c in p))
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
        wrote.append(path)
    if not wrote:
        raise BandSenseError("nothing to export: give --shape, --cloud, or --truth")
    print("\n".join(wrote))
    return 0


def _add_geometry(parser):
    parser.add_argument(
        "--geometry",
        help="robot geometry as 'D,L,N' in meters (default "
        f"{DEFAULT_GEOMETRY})",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bandsense",
        description="Shape sensing and event detection for sensor-band robots.",
    )
    parser.add_argument(
        "--config", help="JSON file supplying default values for any flag"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a scenario into a telemetry log")
    p.add_argument("scenario")
    p.add_argument("out")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("reconstruct", help="reconstruct shape at one log tick")
    p.add_argument("log")
    p.add_argument("out")
    _add_geometry(p)
    p.add_argument("--tick", type=int, help="tick to reconstruct (-1 = last)")
    p.set_defaults(func=_cmd_reconstruct)

    p = sub.add_parser("uncertainty", help="Monte Carlo shape cloud at one tick")
    p.add_argument("log")
    p.add_argument("out")
    _add_geometry(p)
    p.add_argument("--tick", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--angle-err-deg", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--percentile", type=float)
    p.add_argument("--workers", type=int)
    p.add_argument("--fixed-bend-location", action="store_true")
    p.add_argument("--max-export", type=int, help="cap exported sample polylines")
    p.set_defaults(func=_cmd_uncertainty)

    p = sub.add_parser("events", help="detect directional heat events in a log")
    p.add_argument("log")
    _add_geometry(p)
    p.add_argument("--out", help="events file (default: stdout)")
    p.add_argument("--tick", type=int, help="tick whose shape maps directions")
    p.add_argument("--threshold", type=float, help="temperature rise threshold (C)")
    p.add_argument("--baseline-window", type=float)
    p.set_defaults(func=_cmd_events)

    p = sub.add_parser("evaluate", help="position errors against ground truth")
    p.add_argument("shape")
    p.add_argument("truth")
    p.add_argument("--plane", choices=["xy", "none"])
    p.add_argument("--out", help="optional error-report file")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("export-plot", help="emit plot-ready delimited layers")
    p.add_argument("--shape")
    p.add_argument("--cloud")
    p.add_argument("--truth")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--max-export", type=int)
    p.set_defaults(func=_cmd_export_plot)

    return parser


_DEFAULTS = {
    "geometry": DEFAULT_GEOMETRY,
    "tick": 0,
    "samples": 2000,
    "angle_err_deg": 3.0,
    "seed": 0,
    "percentile": 0.95,
    "workers": 1,
    "threshold": 2.0,
    "baseline_window": 1.0,
    "plane": "xy",
    "max_export": None,
}


def _apply_config(args: argparse.Namespace, config_path: str | None):
    config = {}
    if config_path:
        with open(config_path, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    for key, value in vars(args).items():
        if value is None:
            if key in config:
                setattr(args, key, config[key])
            elif key in _DEFAULTS:
                setattr(args, key, _DEFAULTS[key])
    return args


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args, args.config)
        return args.func(args)
    except (BandSenseError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

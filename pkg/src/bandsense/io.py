"""Versioned, deterministic text formats for logs, shapes, and reports.

All files are comma-delimited with a mandatory ``# bandsense-<kind> v<N>``
header.  Lengths are stored in meters (ground truth headers may declare cm
or mm and are converted on read), angles in radians, temperatures in
Celsius.  Floats are serialized with ``repr``, whose shortest round-trip
representation makes every read/write pair lossless and byte-stable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .bus import TelemetryLog, TelemetryRecord, THERMISTOR_COUNT
from .errors import ParseError, SchemaVersionMismatch, TooFewPoints
from .geometry import Pose, RobotGeometry, ShapeEstimate
from .orientation import UnitOrientation
from .registration import ErrorReport, GroundTruthShape
from .sensing import HeatEvent, ThermistorLayout
from .sim import FailureEvent, FieldSource, Scenario

LOG_VERSION = 1
GT_VERSION = 1
SHAPE_VERSION = 1
CLOUD_VERSION = 1
EVENTS_VERSION = 1
SCENARIO_VERSION = 1

_UNIT_SCALE = {"m": 1.0, "cm": 0.01, "mm": 0.001}


def _f(x: float) -> str:
    return repr(float(x))


def _parse_header(line: str, kind: str, version: int, line_number: int = 1):
    prefix = f"# bandsense-{kind} v"
    if not line.startswith(prefix):
        raise ParseError(f"expected header starting with {prefix!r}", line_number)
    rest = line[len(prefix):]
    fields = rest.split(None, 1)
    try:
        got = int(fields[0])
    except ValueError:
        raise ParseError("unparseable schema version", line_number) from None
    if got != version:
        raise SchemaVersionMismatch(
            f"{kind} schema v{got} not supported (expected v{version})"
        )
    return fields[1] if len(fields) > 1 else ""


def _open_lines(path_or_stream):
    if hasattr(path_or_stream, "read"):
        return path_or_stream.read().splitlines()
    with open(path_or_stream, "r", encoding="utf-8") as fh:
        return fh.read().splitlines()


def _write_text(path_or_stream, text: str):
    if hasattr(path_or_stream, "write"):
        path_or_stream.write(text)
    else:
        with open(path_or_stream, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# --- telemetry log ---

_LOG_COLUMNS = "tick,time_s,band_id,status,qw,qx,qy,qz,t0,t1,t2,t3,humidity"


def write_log(log: TelemetryLog, path_or_stream):
    lines = [
        f"# bandsense-telemetry v{LOG_VERSION} "
        "units:time_s=s;orientation=quat-wxyz;thermistors=C;humidity=%RH",
        _LOG_COLUMNS,
    ]
    for r in log.records:
        if r.status == "ok":
            q = r.orientation
            fields = [
                str(r.tick),
                _f(r.time_s),
                str(r.band_id),
                "ok",
                _f(q.w),
                _f(q.x),
                _f(q.y),
                _f(q.z),
                *[_f(t) for t in r.thermistors],
                _f(r.humidity),
            ]
        else:
            fields = [str(r.tick), _f(r.time_s), str(r.band_id), "missing"] + [""] * 9
        lines.append(",".join(fields))
    _write_text(path_or_stream, "\n".join(lines) + "\n")


def read_log(path_or_stream) -> TelemetryLog:
    lines = _open_lines(path_or_stream)
    if not lines:
        raise ParseError("empty file", 1)
    _parse_header(lines[0], "telemetry", LOG_VERSION)
    if len(lines) < 2 or lines[1] != _LOG_COLUMNS:
        raise ParseError(f"expected column header {_LOG_COLUMNS!r}", 2)
    log = TelemetryLog()
    for num, line in enumerate(lines[2:], start=3):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 13:
            raise ParseError(f"expected 13 fields, got {len(parts)}", num)
        try:
            tick = int(parts[0])
            time_s = float(parts[1])
            band_id = int(parts[2])
            status = parts[3]
            if status == "ok":
                q = UnitOrientation(*(float(p) for p in parts[4:8]))
                thermistors = tuple(float(p) for p in parts[8:12])
                humidity = float(parts[12])
                rec = TelemetryRecord(
                    tick, time_s, band_id, "ok", q, thermistors, humidity
                )
            elif status == "missing":
                rec = TelemetryRecord(tick, time_s, band_id, "missing")
            else:
                raise ValueError(f"unknown status {status!r}")
        except ValueError as exc:
            raise ParseError(str(exc), num) from None
        log.records.append(rec)
    return log


# --- ground truth ---


def write_ground_truth(truth: GroundTruthShape, path_or_stream, units: str = "m"):
    scale = 1.0 / _UNIT_SCALE[units]
    lines = [f"# bandsense-groundtruth v{GT_VERSION} units={units} frame={truth.frame_note}"]
    dim = truth.band_points.shape[1]
    lines.append("kind," + ",".join("xyz"[:dim]))
    for p in truth.band_points:
        lines.append("band," + ",".join(_f(c * scale) for c in p))
    if truth.midpoints is not None:
        for p in truth.midpoints:
            lines.append("mid," + ",".join(_f(c * scale) for c in p))
    _write_text(path_or_stream, "\n".join(lines) + "\n")


def read_ground_truth(path_or_stream) -> GroundTruthShape:
    lines = _open_lines(path_or_stream)
    if not lines:
        raise ParseError("empty file", 1)
    meta = _parse_header(lines[0], "groundtruth", GT_VERSION)
    units = "m"
    frame_note = ""
    if meta.startswith("units="):
        unit_field, _, rest = meta.partition(" ")
        units = unit_field[len("units="):]
        if rest.startswith("frame="):
            frame_note = rest[len("frame="):]
    if units not in _UNIT_SCALE:
        raise ParseError(f"unknown units {units!r}", 1)
    scale = _UNIT_SCALE[units]
    bands = []
    mids = []
    for num, line in enumerate(lines[1:], start=2):
        if not line or line.startswith("kind,"):
            continue
        parts = line.split(",")
        if parts[0] not in ("band", "mid") or len(parts) not in (3, 4):
            raise ParseError(f"malformed record {line!r}", num)
        try:
            coords = [float(p) * scale for p in parts[1:]]
        except ValueError:
            raise ParseError(f"unparseable coordinates in {line!r}", num) from None
        (bands if parts[0] == "band" else mids).append(coords)
    if len(bands) < 2:
        raise TooFewPoints(f"ground truth has {len(bands)} band points")
    return GroundTruthShape(
        np.array(bands),
        np.array(mids) if mids else None,
        frame_note,
    )


# --- shape export ---


def write_shape(shape, path_or_stream):
    """Write a ShapeEstimate (or a bare polyline) as tagged points."""
    if isinstance(shape, ShapeEstimate):
        points = shape.centerline
        kinds = ["band" if k == "base" else k for k in shape.point_kinds]
    else:
        points = np.atleast_2d(np.asarray(shape, dtype=float))
        kinds = ["band"] * points.shape[0]
    lines = [f"# bandsense-shape v{SHAPE_VERSION} units=m", "kind,x,y,z"]
    for kind, p in zip(kinds, points):
        lines.append(f"{kind}," + ",".join(_f(c) for c in p))
    _write_text(path_or_stream, "\n".join(lines) + "\n")


def read_shape(path_or_stream):
    """Returns ``(points, kinds)`` with kinds in {"band", "kink"}."""
    lines = _open_lines(path_or_stream)
    if not lines:
        raise ParseError("empty file", 1)
    _parse_header(lines[0], "shape", SHAPE_VERSION)
    points = []
    kinds = []
    for num, line in enumerate(lines[1:], start=2):
        if not line or line == "kind,x,y,z":
            continue
        parts = line.split(",")
        if len(parts) != 4 or parts[0] not in ("band", "kink"):
            raise ParseError(f"malformed shape record {line!r}", num)
        try:
            points.append([float(p) for p in parts[1:]])
        except ValueError:
            raise ParseError(f"unparseable coordinates in {line!r}", num) from None
        kinds.append(parts[0])
    return np.array(points), kinds


# --- shape cloud export ---


def write_cloud(cloud, path_or_stream, max_samples: int | None = None):
    """Per-band stats block followed by per-sample band polylines.

    ``max_samples`` caps the exported sample polylines (evenly decimated);
    the stats always summarize the full ensemble.
    """
    n = cloud.n_samples
    if max_samples is None or max_samples >= n:
        keep = range(n)
    else:
        keep = [int(i) for i in np.linspace(0, n - 1, max_samples)]
    lines = [
        f"# bandsense-cloud v{CLOUD_VERSION} units=m samples={n} "
        f"exported={len(list(keep))} percentile={_f(cloud.percentile)}",
        "record,a,b,x,y,z",
    ]
    keep = list(keep)
    for b, st in enumerate(cloud.per_band_stats):
        m = st.mean_position
        lines.append(
            f"stats,{b},{_f(st.max_radius_m)},{_f(m[0])},{_f(m[1])},{_f(m[2])}"
        )
        lines.append(
            f"pstats,{b},{_f(st.percentile_radius_m)},{_f(m[0])},{_f(m[1])},{_f(m[2])}"
        )
    for i in keep:
        for b in range(cloud.geom.band_count):
            p = cloud.band_positions[i, b]
            lines.append(f"point,{i},{b},{_f(p[0])},{_f(p[1])},{_f(p[2])}")
    _write_text(path_or_stream, "\n".join(lines) + "\n")


def read_cloud(path_or_stream):
    """Returns ``(stats, samples)``.

    ``stats`` is a list of dicts with mean/max_radius_m/percentile_radius_m;
    ``samples`` maps sample index to an (n_bands, 3) array.
    """
    lines = _open_lines(path_or_stream)
    if not lines:
        raise ParseError("empty file", 1)
    _parse_header(lines[0], "cloud", CLOUD_VERSION)
    stats = {}
    samples = {}
    for num, line in enumerate(lines[1:], start=2):
        if not line or line == "record,a,b,x,y,z":
            continue
        parts = line.split(",")
        try:
            if parts[0] == "stats":
                b = int(parts[1])
                stats.setdefault(b, {})["max_radius_m"] = float(parts[2])
                stats[b]["mean"] = np.array([float(p) for p in parts[3:6]])
            elif parts[0] == "pstats":
                b = int(parts[1])
                stats.setdefault(b, {})["percentile_radius_m"] = float(parts[2])
            elif parts[0] == "point":
                i, b = int(parts[1]), int(parts[2])
                samples.setdefault(i, {})[b] = [float(p) for p in parts[3:6]]
            else:
                raise ValueError(f"unknown record kind {parts[0]!r}")
        except (ValueError, IndexError):
            raise ParseError(f"malformed cloud record {line!r}", num) from None
    ordered_stats = [stats[b] for b in sorted(stats)]
    ordered_samples = {
        i: np.array([bands[b] for b in sorted(bands)]) for i, bands in samples.items()
    }
    return ordered_stats, ordered_samples


# --- events ---

_EVENT_COLUMNS = "band_id,thermistor_index,onset_time_s,peak_delta,dir_x,dir_y,dir_z"


def write_events(events, path_or_stream):
    lines = [f"# bandsense-events v{EVENTS_VERSION}", _EVENT_COLUMNS]
    for e in events:
        d = e.world_direction
        lines.append(
            f"{e.band_id},{e.thermistor_index},{_f(e.onset_time_s)},"
            f"{_f(e.peak_delta)},{_f(d[0])},{_f(d[1])},{_f(d[2])}"
        )
    _write_text(path_or_stream, "\n".join(lines) + "\n")


def read_events(path_or_stream) -> list:
    lines = _open_lines(path_or_stream)
    if not lines:
        raise ParseError("empty file", 1)
    _parse_header(lines[0], "events", EVENTS_VERSION)
    events = []
    for num, line in enumerate(lines[1:], start=2):
        if not line or line == _EVENT_COLUMNS:
            continue
        parts = line.split(",")
        if len(parts) != 7:
            raise ParseError(f"expected 7 fields, got {len(parts)}", num)
        try:
            events.append(
                HeatEvent(
                    int(parts[0]),
                    int(parts[1]),
                    float(parts[2]),
                    float(parts[3]),
                    np.array([float(p) for p in parts[4:7]]),
                )
            )
        except ValueError:
            raise ParseError(f"unparseable event {line!r}", num) from None
    return events


# --- error report ---


def write_error_report(report: ErrorReport, path_or_stream):
    lines = [
        "# bandsense-errors v1",
        "band,error_m",
    ]
    for b, e in enumerate(report.per_band_error_m):
        lines.append(f"{b},{_f(e)}")
    lines.append(f"max,{_f(report.max_error_m)}")
    lines.append(f"argmax,{report.argmax_band}")
    _write_text(path_or_stream, "\n".join(lines) + "\n")


# --- scenario config (JSON) ---


def scenario_to_dict(s: Scenario) -> dict:
    def source(d: FieldSource) -> dict:
        return {
            "position": [float(c) for c in d.position],
            "strength": d.strength,
            "falloff_m": d.falloff_m,
            "t_start_s": d.t_start_s,
            "t_end_s": None if math.isinf(d.t_end_s) else d.t_end_s,
        }

    return {
        "schema_version": SCENARIO_VERSION,
        "geometry": {
            "diameter_m": s.geometry.diameter_m,
            "band_spacing_m": s.geometry.band_spacing_m,
            "band_count": s.geometry.band_count,
        },
        "duration_s": s.duration_s,
        "tick_hz": s.tick_hz,
        "seed": s.seed,
        "heading_noise_rad": s.heading_noise_rad,
        "ambient_temp_c": s.ambient_temp_c,
        "ambient_rh": s.ambient_rh,
        "layout": {
            "count_per_band": s.layout.count_per_band,
            "angular_positions_rad": list(s.layout.angular_positions_rad),
            "humidity_angle_rad": s.layout.humidity_angle_rad,
        },
        "heat_sources": [source(d) for d in s.heat_sources],
        "humidity_sources": [source(d) for d in s.humidity_sources],
        "failure_schedule": [
            {"time_s": e.time_s, "address": e.address, "action": e.action}
            for e in s.failure_schedule
        ],
        "keyframes": [
            {
                "time_s": t,
                "poses": [
                    {
                        "position": [float(c) for c in p.position],
                        "orientation": [
                            p.orientation.w,
                            p.orientation.x,
                            p.orientation.y,
                            p.orientation.z,
                        ],
                    }
                    for p in poses
                ],
            }
            for t, poses in s.keyframes
        ],
    }


def scenario_from_dict(data: dict) -> Scenario:
    version = data.get("schema_version")
    if version != SCENARIO_VERSION:
        raise SchemaVersionMismatch(
            f"scenario schema v{version} not supported (expected v{SCENARIO_VERSION})"
        )

    def source(d: dict) -> FieldSource:
        t_end = d.get("t_end_s")
        return FieldSource(
            np.array(d["position"], dtype=float),
            float(d["strength"]),
            float(d["falloff_m"]),
            float(d.get("t_start_s", 0.0)),
            math.inf if t_end is None else float(t_end),
        )

    geom = RobotGeometry(**data["geometry"])
    layout_data = data.get("layout")
    layout = (
        ThermistorLayout(
            layout_data["count_per_band"],
            tuple(layout_data["angular_positions_rad"]),
            layout_data.get("humidity_angle_rad"),
        )
        if layout_data
        else ThermistorLayout()
    )
    keyframes = [
        (
            float(kf["time_s"]),
            [
                Pose(
                    np.array(p["position"], dtype=float),
                    UnitOrientation.from_wxyz(p["orientation"]),
                )
                for p in kf["poses"]
            ],
        )
        for kf in data["keyframes"]
    ]
    return Scenario(
        geometry=geom,
        keyframes=keyframes,
        duration_s=float(data["duration_s"]),
        heat_sources=[source(d) for d in data.get("heat_sources", [])],
        humidity_sources=[source(d) for d in data.get("humidity_sources", [])],
        heading_noise_rad=float(data.get("heading_noise_rad", math.radians(2.5))),
        ambient_temp_c=float(data.get("ambient_temp_c", 22.0)),
        ambient_rh=float(data.get("ambient_rh", 40.0)),
        layout=layout,
        failure_schedule=[
            FailureEvent(float(e["time_s"]), int(e["address"]), e["action"])
            for e in data.get("failure_schedule", [])
        ],
        tick_hz=float(data.get("tick_hz", 50.0)),
        seed=int(data.get("seed", 0)),
    )


def read_scenario(path_or_stream) -> Scenario:
    if hasattr(path_or_stream, "read"):
        data = json.load(path_or_stream)
    else:
        with open(path_or_stream, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    return scenario_from_dict(data)


def write_scenario(scenario: Scenario, path_or_stream):
    text = json.dumps(scenario_to_dict(scenario), indent=2, sort_keys=True) + "\n"
    _write_text(path_or_stream, text)


# --- raw thermistor conversion ---


def thermistor_resistance_to_celsius(
    resistance_ohm: float, a: float, b: float, c: float
) -> float:
    """Steinhart-Hart conversion for logs that store raw NTC resistance."""
    if resistance_ohm <= 0.0:
        raise ValueError("resistance must be positive")
    ln_r = math.log(resistance_ohm)
    inv_t = a + b * ln_r + c * ln_r**3
    return 1.0 / inv_t - 273.15

"""Deterministic tick-driven simulator generating oracle telemetry.

A scenario scripts the true robot trajectory (step-interpolated pose
keyframes), environmental heat/humidity sources, magnetometer-style heading
noise, and a band failure schedule.  Time is purely logical: tick i occurs
at ``start + i / tick_hz`` and the tick count is ``ceil(duration * tick_hz)``
exactly.  All randomness comes from counter-based streams keyed by
(seed, tick, band), so identical scenarios yield identical logs.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np

from .bus import ADDR_MIN, BandNode, SensorState, TelemetryLog, poll_cycle
from .errors import TimeOutOfRange
from .geometry import Pose, RobotGeometry
from .orientation import UnitOrientation
from .sensing import ThermistorLayout
from .streams import unit_draws

WORLD_UP = np.array([0.0, 0.0, 1.0])

# BNO055-class magnetometer heading accuracy.
DEFAULT_HEADING_NOISE_RAD = math.radians(2.5)

DEFAULT_TICK_HZ = 50.0


@dataclass(frozen=True)
class FieldSource:
    """A point source with exponential falloff, active over a time window."""

    position: np.ndarray
    strength: float
    falloff_m: float
    t_start_s: float = 0.0
    t_end_s: float = math.inf

    def __post_init__(self):
        object.__setattr__(
            self, "position", np.asarray(self.position, dtype=float).reshape(3)
        )
        if self.falloff_m <= 0.0:
            raise ValueError("falloff_m must be positive")

    def active(self, time_s: float) -> bool:
        return self.t_start_s <= time_s <= self.t_end_s


@dataclass(frozen=True)
class FailureEvent:
    time_s: float
    address: int
    action: str  # "fail" or "recover"

    def __post_init__(self):
        if self.action not in ("fail", "recover"):
            raise ValueError("action must be 'fail' or 'recover'")


@dataclass
class Scenario:
    """Everything needed to generate one deterministic telemetry log."""

    geometry: RobotGeometry
    keyframes: list  # (time_s, [Pose per band]); step interpolation
    duration_s: float
    heat_sources: list = field(default_factory=list)
    humidity_sources: list = field(default_factory=list)
    heading_noise_rad: float = DEFAULT_HEADING_NOISE_RAD
    ambient_temp_c: float = 22.0
    ambient_rh: float = 40.0
    layout: ThermistorLayout = field(default_factory=ThermistorLayout)
    failure_schedule: list = field(default_factory=list)
    tick_hz: float = DEFAULT_TICK_HZ
    seed: int = 0

    def __post_init__(self):
        if self.tick_hz <= 0.0:
            raise ValueError("tick_hz must be positive")
        if self.duration_s <= 0.0:
            raise ValueError("duration_s must be positive")
        if not self.keyframes:
            raise ValueError("scenario needs at least one keyframe")
        times = [t for t, _ in self.keyframes]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("keyframe times must be strictly increasing")
        for t, poses in self.keyframes:
            if len(poses) != self.geometry.band_count:
                raise ValueError(
                    f"keyframe at {t} s has {len(poses)} poses for "
                    f"{self.geometry.band_count} bands"
                )

    @property
    def start_s(self) -> float:
        return self.keyframes[0][0]

    @property
    def tick_count(self) -> int:
        return math.ceil(self.duration_s * self.tick_hz)

    def poses_at(self, time_s: float) -> list:
        if not self.start_s <= time_s <= self.start_s + self.duration_s:
            raise TimeOutOfRange(
                f"time {time_s} outside [{self.start_s}, "
                f"{self.start_s + self.duration_s}]"
            )
        times = [t for t, _ in self.keyframes]
        idx = bisect_right(times, time_s) - 1
        if idx < 0:
            raise TimeOutOfRange(f"time {time_s} precedes first keyframe")
        return self.keyframes[idx][1]


def _field_value(sources, point, time_s, direction=None):
    total = 0.0
    for src in sources:
        if not src.active(time_s):
            continue
        offset = src.position - point
        d = float(np.linalg.norm(offset))
        gain = src.strength * math.exp(-d / src.falloff_m)
        if direction is not None:
            if d > 0.0:
                cos_a = float(np.dot(direction, offset / d))
            else:
                cos_a = 1.0
            gain *= max(0.0, cos_a)
        total += gain
    return total


def synthesize_sensor_state(
    scenario: Scenario, time_s: float, band_index: int, tick: int
) -> SensorState:
    """True pose plus sensor models: heading noise, thermistors, humidity.

    Heading noise is a uniform draw in ``[-b, +b]`` applied as a rotation
    about the world vertical (magnetometer heading error leaves the
    gravity-referenced tilt intact).  Thermistor k reads ambient plus, for
    each active source, ``strength * exp(-d / falloff) * max(0, cos alpha)``
    with d the thermistor-to-source distance and alpha the angle between the
    outward radial and the source direction.  Humidity is the same without
    the direction factor, measured at the band center.
    """
    pose = scenario.poses_at(time_s)[band_index]
    q_true = pose.orientation

    if scenario.heading_noise_rad > 0.0:
        u = unit_draws(scenario.seed, tick, band_index, n=1, domain=b"hdg")[0]
        delta = (2.0 * u - 1.0) * scenario.heading_noise_rad
        q_meas = UnitOrientation.from_axis_angle(WORLD_UP, delta).compose(q_true)
    else:
        q_meas = q_true

    radius = 0.5 * scenario.geometry.diameter_m
    temps = []
    for k in range(scenario.layout.count_per_band):
        radial_world = q_true.rotate(scenario.layout.radial_body(k))
        tip = pose.position + radius * radial_world
        temps.append(
            scenario.ambient_temp_c
            + _field_value(scenario.heat_sources, tip, time_s, radial_world)
        )
    humidity = scenario.ambient_rh + _field_value(
        scenario.humidity_sources, pose.position, time_s
    )
    return SensorState(q_meas, tuple(temps), humidity)


def run_scenario(scenario: Scenario) -> TelemetryLog:
    """Generate the full telemetry log for a scenario.

    Failure-schedule events take effect at the first tick at or after their
    event time.
    """
    nodes = [
        BandNode(ADDR_MIN + b, b) for b in range(scenario.geometry.band_count)
    ]
    by_address = {n.address: n for n in nodes}
    events = sorted(scenario.failure_schedule, key=lambda e: e.time_s)
    next_event = 0

    log = TelemetryLog()
    for tick in range(scenario.tick_count):
        t = scenario.start_s + tick / scenario.tick_hz
        while next_event < len(events) and events[next_event].time_s <= t:
            ev = events[next_event]
            if ev.address in by_address:
                by_address[ev.address].failed = ev.action == "fail"
            next_event += 1
        for node in nodes:
            if not node.failed:
                node.sensor_state = synthesize_sensor_state(
                    scenario, t, node.band_index, tick
                )
        _, records = poll_cycle(nodes, tick, t)
        log.records.extend(records)
    return log


def static_scenario(
    geometry: RobotGeometry,
    poses: list,
    duration_s: float,
    **kwargs,
) -> Scenario:
    """A scenario whose true shape never moves (posed-robot experiments)."""
    return Scenario(
        geometry=geometry,
        keyframes=[(0.0, list(poses))],
        duration_s=duration_s,
        **kwargs,
    )

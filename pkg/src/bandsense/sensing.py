"""Directional heat-source localization and humidity-rise detection.

The thermistors sit at fixed angles around the body circumference, so a
directional heat source shows up as a local maximum over the band index for
one thermistor channel.  Detection works on baseline-subtracted series, is
invariant to a global offset, and maps the winning thermistor's radial
direction into the world frame through the band's absolute orientation
(which carries any accumulated roll).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import LengthMismatch, MisalignedSeries, WindowTooLong
from .geometry import ShapeEstimate

# A band peak must exceed both neighbors by this fraction of its own delta
# to count as a local maximum.
NEIGHBOR_CONTRAST = 0.10

# Onset is the first crossing of this fraction of the peak delta.
ONSET_FRACTION = 0.5


def _default_angles(count: int) -> tuple:
    # Evenly spaced over the top half-circumference (+y around to -y via +z).
    return tuple(math.pi * (2 * k + 1) / (2 * count) for k in range(count))


@dataclass(frozen=True)
class ThermistorLayout:
    """Angular placement of the thermistors around the body.

    Angles are measured in the band frame about the forward (+x) axis, with
    0 at +y and pi/2 at +z; the defaults span the top half of the
    circumference.  ``humidity_angle_rad`` records where the humidity sensor
    sits (near the last-but-one thermistor by default).
    """

    count_per_band: int = 4
    angular_positions_rad: tuple = ()
    humidity_angle_rad: float | None = None

    def __post_init__(self):
        if self.count_per_band < 1:
            raise ValueError("count_per_band must be positive")
        angles = self.angular_positions_rad or _default_angles(self.count_per_band)
        angles = tuple(float(a) for a in angles)
        if len(angles) != self.count_per_band:
            raise LengthMismatch(
                f"{len(angles)} angles for {self.count_per_band} thermistors"
            )
        if any(not 0.0 <= a < 2.0 * math.pi for a in angles):
            raise ValueError("angles must lie in [0, 2*pi)")
        if any(b <= a for a, b in zip(angles, angles[1:])):
            raise ValueError("angles must be strictly increasing")
        object.__setattr__(self, "angular_positions_rad", angles)
        if self.humidity_angle_rad is None:
            object.__setattr__(self, "humidity_angle_rad", angles[-1])

    def radial_body(self, index: int) -> np.ndarray:
        """Outward radial unit vector of thermistor ``index`` in the band frame."""
        a = self.angular_positions_rad[index]
        return np.array([0.0, math.cos(a), math.sin(a)])


@dataclass(frozen=True)
class ScalarSeries:
    """One sensor channel over time."""

    timestamps: np.ndarray
    values: np.ndarray
    band_id: int = 0
    channel: int | str = 0

    def __post_init__(self):
        t = np.asarray(self.timestamps, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.shape != v.shape or t.ndim != 1:
            raise LengthMismatch("timestamps and values must be equal-length 1D")
        if t.size >= 2 and np.any(np.diff(t) <= 0.0):
            raise ValueError("timestamps must be strictly increasing")
        object.__setattr__(self, "timestamps", t)
        object.__setattr__(self, "values", v)

    @property
    def span_s(self) -> float:
        return float(self.timestamps[-1] - self.timestamps[0])


@dataclass(frozen=True)
class HeatEvent:
    """A localized directional temperature rise."""

    band_id: int
    thermistor_index: int
    onset_time_s: float
    peak_delta: float
    world_direction: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "world_direction", np.asarray(self.world_direction, dtype=float)
        )


def baseline_subtract(series: ScalarSeries, window_s: float) -> ScalarSeries:
    """Subtract the mean of the initial ``window_s`` seconds from a series."""
    if window_s >= series.span_s:
        raise WindowTooLong(
            f"window {window_s} s >= series span {series.span_s} s"
        )
    t0 = series.timestamps[0]
    mask = series.timestamps <= t0 + window_s
    baseline = float(series.values[mask].mean())
    return ScalarSeries(
        series.timestamps, series.values - baseline, series.band_id, series.channel
    )


def _check_aligned(grid):
    ref = grid[0][0].timestamps
    dt = float(np.median(np.diff(ref))) if ref.size >= 2 else 0.0
    for band in grid:
        for s in band:
            if s.timestamps.shape != ref.shape or np.any(
                np.abs(s.timestamps - ref) > dt
            ):
                raise MisalignedSeries(
                    f"band {s.band_id} channel {s.channel} is not on the "
                    "shared time base"
                )


def detect_heat_events(
    grid,
    layout: ThermistorLayout,
    shape: ShapeEstimate,
    threshold: float,
    baseline_window_s: float = 1.0,
) -> list:
    """Find directional heat events across the whole thermistor grid.

    ``grid`` is band-major: ``grid[band][thermistor]`` is a ScalarSeries.
    For each band only its strongest channel competes; an event requires its
    baseline-subtracted peak to exceed ``threshold`` and to be a local
    maximum over the neighboring bands' same channel at the peak time.
    """
    if len(grid) != shape.band_count:
        raise LengthMismatch(
            f"grid has {len(grid)} bands, shape has {shape.band_count}"
        )
    for band in grid:
        if len(band) != layout.count_per_band:
            raise LengthMismatch(
                f"band has {len(band)} channels, layout has "
                f"{layout.count_per_band}"
            )
    _check_aligned(grid)
    flat = [
        [baseline_subtract(s, baseline_window_s) for s in band] for band in grid
    ]

    events = []
    n_bands = len(flat)
    for b in range(n_bands):
        deltas = np.array([s.values for s in flat[b]])
        peaks = deltas.max(axis=1)
        ch = int(np.argmax(peaks))
        peak_delta = float(peaks[ch])
        if peak_delta <= threshold:
            continue
        t_idx = int(np.argmax(deltas[ch]))
        margin = NEIGHBOR_CONTRAST * peak_delta
        is_local_max = True
        for nb in (b - 1, b + 1):
            if 0 <= nb < n_bands:
                if peak_delta < flat[nb][ch].values[t_idx] + margin:
                    is_local_max = False
                    break
        if not is_local_max:
            continue
        series = flat[b][ch]
        onset_idx = int(np.argmax(series.values >= ONSET_FRACTION * peak_delta))
        onset_time = float(series.timestamps[onset_idx])
        direction = shape.band_poses[b].orientation.rotate(layout.radial_body(ch))
        events.append(HeatEvent(b, ch, onset_time, peak_delta, direction))
    return events


def detect_humidity_rise(
    series: ScalarSeries, threshold: float, window_s: float
) -> list:
    """Onsets where the baseline-subtracted humidity first exceeds threshold.

    Returns ``(onset_time_s, magnitude)`` per above-threshold excursion; the
    magnitude is the excursion maximum.
    """
    flat = baseline_subtract(series, window_s)
    above = flat.values > threshold
    out = []
    i = 0
    n = above.size
    while i < n:
        if above[i]:
            j = i
            while j < n and above[j]:
                j += 1
            out.append(
                (float(flat.timestamps[i]), float(flat.values[i:j].max()))
            )
            i = j
        else:
            i += 1
    return out

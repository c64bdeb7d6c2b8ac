"""Monte Carlo propagation of bend-location and angle uncertainty.

Each sample redraws, per segment, the kink location uniformly over its
feasible range ``[0, band_spacing - arc_length]`` and (optionally) perturbs
the scalar bend angle by an independent uniform draw in ``[-eps, +eps]``
about the unperturbed bend axis, re-clamped to the feasible angle range.
Randomness is counter-based per (seed, sample, segment), so clouds are
bit-reproducible under any work partitioning.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyCloud, LengthMismatch
from .geometry import (
    Pose,
    RobotGeometry,
    SegmentBend,
    ShapeEstimate,
    bend_between,
    heading_from_orientation,
    reconstruct_shape,
)
from .orientation import UnitOrientation
from .streams import draw_grid

ANGLE_ERROR_CAP_RAD = math.pi / 6


@dataclass(frozen=True)
class McConfig:
    """Sampling configuration for shape clouds."""

    n_samples: int = 2000
    angle_error_bound_rad: float = 0.0
    vary_bend_location: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if not 0.0 <= self.angle_error_bound_rad < ANGLE_ERROR_CAP_RAD:
            raise ValueError(
                f"angle_error_bound_rad must be in [0, {ANGLE_ERROR_CAP_RAD:.4f})"
            )


@dataclass(frozen=True)
class BandStats:
    """Per-band spread of a shape cloud about the sample mean."""

    mean_position: np.ndarray
    max_radius_m: float
    percentile_radius_m: float


@dataclass
class ShapeCloud:
    """A Monte Carlo ensemble of shapes, stored column-wise.

    Sample ``i``'s band centers are ``band_positions[i]``; kink rows are NaN
    for segments whose nominal bend is straight (no kink is ever emitted
    there).  ``sample_estimate(i)`` materializes a full ShapeEstimate.
    """

    geom: RobotGeometry
    config: McConfig
    band_positions: np.ndarray  # (n_samples, band_count, 3)
    band_orientations: np.ndarray  # (n_samples, band_count, 4) wxyz
    kink_positions: np.ndarray  # (n_samples, segment_count, 3), NaN if straight
    thetas: np.ndarray  # (n_samples, segment_count)
    axes: np.ndarray  # (n_samples, segment_count, 3)
    bend_locations: np.ndarray  # (n_samples, segment_count)
    clamp_count: int
    percentile: float = 0.95
    per_band_stats: list = field(default_factory=list)

    @property
    def n_samples(self) -> int:
        return self.band_positions.shape[0]

    def sample_estimate(self, i: int) -> ShapeEstimate:
        poses = [
            Pose(self.band_positions[i, b], UnitOrientation.from_wxyz(self.band_orientations[i, b]))
            for b in range(self.geom.band_count)
        ]
        centerline = [self.band_positions[i, 0]]
        kinds = ["base"]
        bends = []
        for k in range(self.geom.segment_count):
            kink = self.kink_positions[i, k]
            if not np.isnan(kink[0]):
                centerline.append(kink)
                kinds.append("kink")
            centerline.append(self.band_positions[i, k + 1])
            kinds.append("band")
            theta = float(self.thetas[i, k])
            bends.append(
                SegmentBend(
                    theta,
                    self.axes[i, k],
                    0.5 * self.geom.diameter_m * theta,
                    float(self.bend_locations[i, k]),
                )
            )
        return ShapeEstimate(poses, np.array(centerline), bends, kinds)

    @property
    def samples(self) -> list:
        return [self.sample_estimate(i) for i in range(self.n_samples)]


# --- batch quaternion helpers (arrays of wxyz rows) ---


def _q_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    aw, ax, ay, az = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    bw, bx, by, bz = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def _q_rotate(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    qv = q[..., 1:]
    w = q[..., 0:1]
    t = 2.0 * np.cross(qv, v)
    return v + w * t + np.cross(qv, t)


def _q_from_axis_angle(axes: np.ndarray, angles: np.ndarray) -> np.ndarray:
    h = 0.5 * angles
    s = np.sin(h)
    return np.concatenate([np.cos(h)[..., None], axes * s[..., None]], axis=-1)


def _snap_identity(q: np.ndarray) -> np.ndarray:
    # A quaternion with exactly zero vector part is the identity rotation;
    # pin w to 1 so unperturbed samples stay bit-identical to the nominal.
    mask = (q[:, 1] == 0.0) & (q[:, 2] == 0.0) & (q[:, 3] == 0.0)
    q[mask, 0] = 1.0
    return q


def _sample_block(nominal, geom, cfg, i_lo, i_hi):
    """Sample shapes for sample indices [i_lo, i_hi)."""
    headings, quats, bends, base = nominal
    n = i_hi - i_lo
    n_seg = geom.segment_count
    n_band = geom.band_count
    spacing = geom.band_spacing_m
    eps = cfg.angle_error_bound_rad

    draws = draw_grid(cfg.seed, range(i_lo, i_hi), n_seg, 2)
    u_loc = draws[:, :, 0]
    u_ang = draws[:, :, 1]

    band_pos = np.empty((n, n_band, 3))
    band_quat = np.empty((n, n_band, 4))
    kink_pos = np.full((n, n_seg, 3), np.nan)
    thetas = np.empty((n, n_seg))
    axes = np.zeros((n, n_seg, 3))
    locs = np.empty((n, n_seg))
    clamps = 0

    band_pos[:, 0] = base.position
    band_quat[:, 0] = quats[0]
    cur_pos = np.broadcast_to(base.position, (n, 3)).copy()
    cur_head = np.broadcast_to(headings[0], (n, 3)).copy()
    accum = np.zeros((n, 4))
    accum[:, 0] = 1.0

    for k in range(n_seg):
        bend = bends[k]
        if bend.is_straight:
            theta = np.zeros(n)
            straight = np.full(n, spacing)
            s = u_loc[:, k] * straight if cfg.vary_bend_location else 0.5 * straight
            cur_pos = cur_pos + straight[:, None] * cur_head
            # heading and accumulated perturbation unchanged
        elif eps == 0.0:
            # No angle perturbation: keep the nominal rotation chain exactly
            # (accum stays identity) so samples are bit-identical to the
            # midpoint reconstruction apart from the kink location.
            theta = np.full(n, bend.theta_rad)
            axis = np.broadcast_to(bend.axis, (n, 3))
            next_head = np.broadcast_to(headings[k + 1], (n, 3))
            arc = 0.5 * geom.diameter_m * theta
            straight = spacing - arc
            s = u_loc[:, k] * straight if cfg.vary_bend_location else 0.5 * straight
            kink = cur_pos + s[:, None] * cur_head
            kink_pos[:, k] = kink
            cur_pos = kink + (straight - s)[:, None] * next_head
            cur_head = next_head
            axes[:, k] = axis
        else:
            delta = (2.0 * u_ang[:, k] - 1.0) * eps
            theta_raw = bend.theta_rad + delta
            theta = np.clip(theta_raw, 0.0, geom.max_bend_rad)
            clamps += int(np.count_nonzero(theta != theta_raw))
            axis = _q_rotate(accum, bend.axis)
            rot = _q_from_axis_angle(axis, theta)
            # Unwinds the nominal bend so accum tracks only the perturbation.
            undo = _q_from_axis_angle(bend.axis, np.float64(-bend.theta_rad))
            accum = _snap_identity(_q_mul(_q_mul(rot, accum), undo))
            next_head = _q_rotate(accum, headings[k + 1])
            arc = 0.5 * geom.diameter_m * theta
            straight = spacing - arc
            s = u_loc[:, k] * straight if cfg.vary_bend_location else 0.5 * straight
            kink = cur_pos + s[:, None] * cur_head
            kink_pos[:, k] = kink
            cur_pos = kink + (straight - s)[:, None] * next_head
            cur_head = next_head
            axes[:, k] = axis
        thetas[:, k] = theta
        locs[:, k] = s
        band_pos[:, k + 1] = cur_pos
        band_quat[:, k + 1] = _q_mul(accum, quats[k + 1])

    return band_pos, band_quat, kink_pos, thetas, axes, locs, clamps


def sample_shapes(
    orientations,
    geom: RobotGeometry,
    cfg: McConfig,
    base: Pose | None = None,
    percentile: float = 0.95,
    workers: int = 1,
) -> ShapeCloud:
    """Draw a cloud of plausible shapes around the nominal reconstruction.

    Raises InfeasibleBend if the nominal shape itself is infeasible; angle
    perturbations are clamped to feasibility and never raise.  Results are
    bit-identical for a given (inputs, seed) at any ``workers`` count.
    """
    orientations = [
        q if isinstance(q, UnitOrientation) else UnitOrientation.from_wxyz(q)
        for q in orientations
    ]
    if base is None:
        base = Pose.origin()
    # Validates feasibility and pins the nominal bends/headings.
    bends = [
        bend_between(orientations[k], orientations[k + 1], geom, segment=k)
        for k in range(geom.segment_count)
    ]
    if len(orientations) != geom.band_count:
        raise LengthMismatch(
            f"got {len(orientations)} orientations for {geom.band_count} bands"
        )
    headings = np.array(
        [heading_from_orientation(q, geom.forward_axis) for q in orientations]
    )
    quats = np.array([q.as_array() for q in orientations])
    nominal = (headings, quats, bends, base)

    n = cfg.n_samples
    if workers <= 1 or n < 2 * workers:
        blocks = [_sample_block(nominal, geom, cfg, 0, n)]
    else:
        bounds = np.linspace(0, n, workers + 1, dtype=int)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_sample_block, nominal, geom, cfg, int(lo), int(hi))
                for lo, hi in zip(bounds[:-1], bounds[1:])
                if hi > lo
            ]
            blocks = [f.result() for f in futures]

    band_pos, band_quat, kink_pos, thetas, axes, locs = (
        np.concatenate([b[i] for b in blocks]) for i in range(6)
    )
    clamps = sum(b[6] for b in blocks)
    cloud = ShapeCloud(
        geom=geom,
        config=cfg,
        band_positions=band_pos,
        band_orientations=band_quat,
        kink_positions=kink_pos,
        thetas=thetas,
        axes=axes,
        bend_locations=locs,
        clamp_count=clamps,
        percentile=percentile,
    )
    cloud.per_band_stats = cloud_stats(cloud, percentile)
    return cloud


def cloud_stats(cloud: ShapeCloud, percentile: float = 0.95) -> list:
    """Per-band mean and containment radii over the sample ensemble.

    The percentile radius is the smallest radius about the mean containing
    ``ceil(percentile * n)`` samples.
    """
    if cloud.n_samples == 0:
        raise EmptyCloud("cloud has no samples")
    if not 0.0 < percentile <= 1.0:
        raise ValueError("percentile must be in (0, 1]")
    n = cloud.n_samples
    k = max(1, math.ceil(percentile * n))
    stats = []
    for b in range(cloud.geom.band_count):
        pts = cloud.band_positions[:, b, :]
        # Pin the mean of a degenerate ensemble so its radii are exactly 0.
        mean = pts[0] if np.all(pts == pts[0]) else pts.mean(axis=0)
        radii = np.linalg.norm(pts - mean, axis=1)
        order = np.sort(radii)
        stats.append(
            BandStats(
                mean_position=mean,
                max_radius_m=float(order[-1]),
                percentile_radius_m=float(order[k - 1]),
            )
        )
    return stats


def envelope_contains(cloud: ShapeCloud, shape_points, slack_m: float = 0.0) -> list:
    """Whether each band point lies within the cloud's max-radius envelope."""
    pts = np.asarray(shape_points, dtype=float)
    if pts.shape[0] != cloud.geom.band_count:
        raise LengthMismatch(
            f"shape has {pts.shape[0]} points, cloud has "
            f"{cloud.geom.band_count} bands"
        )
    stats = cloud.per_band_stats or cloud_stats(cloud, cloud.percentile)
    out = []
    for b, st in enumerate(stats):
        d = float(np.linalg.norm(pts[b] - st.mean_position))
        out.append(d <= st.max_radius_m + slack_m)
    return out


def nominal_shape(orientations, geom: RobotGeometry, base: Pose | None = None) -> ShapeEstimate:
    """Midpoint-placement reconstruction the cloud scatters around."""
    return reconstruct_shape(orientations, geom, base)

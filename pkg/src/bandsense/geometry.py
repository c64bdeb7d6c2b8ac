"""Discrete-bend kinematic model of the robot centerline.

The robot body between two sensor bands is modeled as straight-kink-straight:
the outer edge keeps constant length and forms a circular arc of length
``(D/2) * theta`` over the bend, while the centerline turns at a single kink
point.  Band spacing is measured along the outer edge, so the straight
centerline length available in a segment is ``band_spacing - arc_length`` and
the kink may sit anywhere in ``[0, band_spacing - arc_length]``.  With the
bend location unknown, reconstruction places each kink at the midpoint of
that feasible range.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import AntiparallelHeadings, EmptyInput, InfeasibleBend, LengthMismatch
from .orientation import FORWARD_AXIS, UnitOrientation, twist_about

# Bends below this angle are treated as straight: no kink point, zero axis.
STRAIGHT_TOL_RAD = 1e-8

# Headings closer than this to opposite are rejected (axis undefined).
ANTIPARALLEL_TOL_RAD = 1e-8

# Band spacing / diameter ratios below this risk multiple bends per segment.
MIN_SPACING_RATIO = 1.5

ZERO_AXIS = np.zeros(3)


@dataclass(frozen=True)
class RobotGeometry:
    """Physical layout of the sensor bands on the robot body."""

    diameter_m: float
    band_spacing_m: float
    band_count: int
    # Body-frame axis defining the heading; +x unless the hardware differs.
    forward_axis: tuple = (1.0, 0.0, 0.0)

    def __post_init__(self):
        if self.diameter_m <= 0.0:
            raise ValueError("diameter_m must be positive")
        if self.band_spacing_m <= 0.0:
            raise ValueError("band_spacing_m must be positive")
        if self.band_count < 2:
            raise ValueError("band_count must be at least 2")
        ratio = self.band_spacing_m / self.diameter_m
        if ratio < MIN_SPACING_RATIO:
            warnings.warn(
                f"band spacing / diameter ratio {ratio:.3f} is below "
                f"{MIN_SPACING_RATIO}; the single-bend-per-segment model may "
                "not hold",
                stacklevel=2,
            )

    @property
    def max_bend_rad(self) -> float:
        """Largest bend angle whose arc fits between two bands."""
        return 2.0 * self.band_spacing_m / self.diameter_m

    @property
    def segment_count(self) -> int:
        return self.band_count - 1


@dataclass(frozen=True)
class Pose:
    """A band frame in world coordinates."""

    position: np.ndarray
    orientation: UnitOrientation

    def __post_init__(self):
        object.__setattr__(
            self, "position", np.asarray(self.position, dtype=float).reshape(3)
        )

    @classmethod
    def origin(cls) -> "Pose":
        return cls(np.zeros(3), UnitOrientation.identity())


@dataclass(frozen=True)
class SegmentBend:
    """The single discrete bend between one pair of bands."""

    theta_rad: float
    axis: np.ndarray
    arc_length_m: float
    bend_location_m: float

    def __post_init__(self):
        object.__setattr__(self, "axis", np.asarray(self.axis, dtype=float).reshape(3))

    @property
    def is_straight(self) -> bool:
        return self.theta_rad <= STRAIGHT_TOL_RAD


@dataclass(frozen=True)
class ShapeEstimate:
    """Reconstructed robot shape: band poses plus the dense centerline."""

    band_poses: list
    centerline: np.ndarray
    segment_bends: list
    # Parallel to centerline rows: "base", "band", or "kink".
    point_kinds: list = field(default_factory=list)

    def __post_init__(self):
        object.__setattr__(
            self, "centerline", np.asarray(self.centerline, dtype=float)
        )

    @property
    def band_count(self) -> int:
        return len(self.band_poses)

    @property
    def band_positions(self) -> np.ndarray:
        return np.array([p.position for p in self.band_poses])


def heading_from_orientation(q: UnitOrientation, forward=None) -> np.ndarray:
    """World-frame robot-axis direction at a band."""
    if forward is None:
        return q.heading()
    return q.rotate(np.asarray(forward, dtype=float))


def arc_length(theta_rad: float, diameter_m: float) -> float:
    """Outer-edge length consumed by a bend of ``theta_rad``."""
    if theta_rad < 0.0:
        raise ValueError("theta_rad must be non-negative")
    if diameter_m <= 0.0:
        raise ValueError("diameter_m must be positive")
    return 0.5 * diameter_m * theta_rad


def bend_angle_axis(h_i: np.ndarray, h_j: np.ndarray):
    """Angle in [0, pi] and unit axis between two unit headings.

    The axis is the normalized cross product; the zero axis for straight.
    """
    cross = np.cross(h_i, h_j)
    sin_t = np.linalg.norm(cross)
    cos_t = float(np.dot(h_i, h_j))
    theta = math.atan2(sin_t, cos_t)
    if theta <= STRAIGHT_TOL_RAD:
        return 0.0, ZERO_AXIS.copy()
    if theta >= math.pi - ANTIPARALLEL_TOL_RAD:
        raise AntiparallelHeadings(
            "consecutive headings are antiparallel; bend axis undefined"
        )
    return theta, cross / sin_t


def bend_between(
    q_i: UnitOrientation,
    q_j: UnitOrientation,
    geom: RobotGeometry,
    segment: int | None = None,
) -> SegmentBend:
    """The discrete bend implied by two consecutive band orientations.

    The kink is placed at the midpoint of its feasible range,
    ``(band_spacing - arc_length) / 2``.
    """
    h_i = heading_from_orientation(q_i, geom.forward_axis)
    h_j = heading_from_orientation(q_j, geom.forward_axis)
    theta, axis = bend_angle_axis(h_i, h_j)
    if theta > geom.max_bend_rad:
        raise InfeasibleBend(theta, geom.max_bend_rad, segment)
    arc = arc_length(theta, geom.diameter_m)
    location = 0.5 * (geom.band_spacing_m - arc)
    return SegmentBend(theta, axis, arc, location)


def segment_forward(
    start: Pose,
    q_next: UnitOrientation,
    geom: RobotGeometry,
    bend_location_m: float | None = None,
    segment: int | None = None,
):
    """Advance one segment from ``start`` to the next band.

    Returns ``(end_pose, kink_points)``.  ``kink_points`` is empty for a
    straight segment, else holds the single centerline kink.  If
    ``bend_location_m`` is None the midpoint placement is used.
    """
    bend = bend_between(start.orientation, q_next, geom, segment)
    straight = geom.band_spacing_m - bend.arc_length_m
    if bend_location_m is None:
        s = bend.bend_location_m
    else:
        s = float(bend_location_m)
        if s < -1e-12 or s > straight + 1e-12:
            raise ValueError(
                f"bend_location_m {s} outside feasible range [0, {straight}]"
            )
        s = min(max(s, 0.0), straight)
        bend = SegmentBend(bend.theta_rad, bend.axis, bend.arc_length_m, s)
    h_i = heading_from_orientation(start.orientation, geom.forward_axis)
    h_j = heading_from_orientation(q_next, geom.forward_axis)
    if bend.is_straight:
        end = start.position + straight * h_i
        return Pose(end, q_next), [], bend
    kink = start.position + s * h_i
    end = kink + (straight - s) * h_j
    return Pose(end, q_next), [kink], bend


def reconstruct_shape(
    orientations,
    geom: RobotGeometry,
    base: Pose | None = None,
    bend_locations=None,
) -> ShapeEstimate:
    """Chain all segments into a full shape estimate.

    ``bend_locations`` overrides the midpoint kink placement per segment
    (used by the uncertainty sampler and by synthetic trajectory builders).
    """
    orientations = list(orientations)
    if len(orientations) < 2:
        raise EmptyInput("need at least 2 orientations to reconstruct a shape")
    if len(orientations) != geom.band_count:
        raise LengthMismatch(
            f"got {len(orientations)} orientations for {geom.band_count} bands"
        )
    if bend_locations is not None and len(bend_locations) != geom.segment_count:
        raise LengthMismatch(
            f"got {len(bend_locations)} bend locations for "
            f"{geom.segment_count} segments"
        )
    if base is None:
        base = Pose.origin()

    pose = Pose(base.position, orientations[0])
    poses = [pose]
    centerline = [pose.position]
    kinds = ["base"]
    bends = []
    for k in range(1, len(orientations)):
        loc = None if bend_locations is None else bend_locations[k - 1]
        pose, kinks, bend = segment_forward(
            pose, orientations[k], geom, loc, segment=k - 1
        )
        for kp in kinks:
            centerline.append(kp)
            kinds.append("kink")
        centerline.append(pose.position)
        kinds.append("band")
        poses.append(pose)
        bends.append(bend)
    return ShapeEstimate(poses, np.array(centerline), bends, kinds)


def relative_roll(q_i: UnitOrientation, q_j: UnitOrientation) -> float:
    """Signed twist of ``q_j`` relative to ``q_i`` about ``q_i``'s heading.

    Twist does not move the centerline but rotates the circumferential
    sensor directions between bands.
    """
    h_i = q_i.heading()
    h_j = q_j.heading()
    sep = math.atan2(np.linalg.norm(np.cross(h_i, h_j)), float(np.dot(h_i, h_j)))
    if sep >= math.pi - ANTIPARALLEL_TOL_RAD:
        raise AntiparallelHeadings("headings antiparallel; roll undefined")
    rel = q_i.inverse().compose(q_j)
    return twist_about(rel, FORWARD_AXIS)

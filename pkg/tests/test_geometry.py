import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bandsense.errors import (
    AntiparallelHeadings,
    EmptyInput,
    InfeasibleBend,
    LengthMismatch,
)
from bandsense.geometry import (
    Pose,
    RobotGeometry,
    arc_length,
    bend_between,
    heading_from_orientation,
    reconstruct_shape,
    relative_roll,
    segment_forward,
)
from bandsense.orientation import UnitOrientation
from bandsense.synthetic import random_feasible_orientations

QI = UnitOrientation.identity()
QZ90 = UnitOrientation.from_axis_angle([0, 0, 1], math.pi / 2)


class TestRobotGeometry:
    def test_validation(self):
        with pytest.raises(ValueError):
            RobotGeometry(0.0, 0.076, 15)
        with pytest.raises(ValueError):
            RobotGeometry(0.066, -1.0, 15)
        with pytest.raises(ValueError):
            RobotGeometry(0.066, 0.076, 1)

    def test_low_spacing_ratio_warns(self):
        with pytest.warns(UserWarning, match="ratio"):
            RobotGeometry(0.066, 0.076, 15)

    def test_high_ratio_silent(self, recwarn):
        RobotGeometry(0.05, 0.08, 4)
        assert not recwarn.list

    def test_max_bend(self, geom):
        assert geom.max_bend_rad == pytest.approx(2 * 0.076 / 0.066)


class TestArcLength:
    def test_zero_angle(self):
        assert arc_length(0.0, 0.066) == 0.0

    def test_right_angle(self):
        assert arc_length(math.pi / 2, 0.066) == pytest.approx(0.051836, abs=1e-6)

    def test_half_right_angle(self):
        assert arc_length(math.pi / 4, 0.066) == pytest.approx(0.025918, abs=1e-6)

    @given(st.floats(0.0, math.pi), st.floats(0.01, 0.5))
    @settings(max_examples=50)
    def test_linear_in_both_arguments(self, theta, d):
        assert arc_length(2 * theta, d) == pytest.approx(2 * arc_length(theta, d))
        assert arc_length(theta, 2 * d) == pytest.approx(2 * arc_length(theta, d))

    def test_rejects_negative_angle(self):
        with pytest.raises(ValueError):
            arc_length(-0.1, 0.066)


class TestBendBetween:
    def test_identical_orientations(self, geom):
        b = bend_between(QI, QI, geom)
        assert b.theta_rad == 0.0
        assert b.is_straight
        assert np.all(b.axis == 0.0)
        assert b.bend_location_m == pytest.approx(0.076 / 2)

    def test_right_angle_bend(self, geom):
        b = bend_between(QI, QZ90, geom)
        assert b.theta_rad == pytest.approx(math.pi / 2)
        assert np.allclose(b.axis, [0, 0, 1], atol=1e-15)
        assert b.arc_length_m == pytest.approx(0.051836, abs=1e-6)
        assert b.bend_location_m == pytest.approx(0.012082, abs=1e-6)

    def test_infeasible_bend(self, geom):
        # Feasibility bound 2 * 0.076 / 0.066 = 2.3030 rad (~131.95 deg).
        q = UnitOrientation.from_axis_angle([0, 0, 1], math.radians(135))
        with pytest.raises(InfeasibleBend):
            bend_between(QI, q, geom)

    def test_boundary_behavior(self, geom):
        limit = geom.max_bend_rad
        under = UnitOrientation.from_axis_angle([0, 0, 1], limit - 1e-6)
        over = UnitOrientation.from_axis_angle([0, 0, 1], limit + 1e-6)
        bend_between(QI, under, geom)
        with pytest.raises(InfeasibleBend):
            bend_between(QI, over, geom)

    def test_antiparallel_rejected(self):
        wide = RobotGeometry(0.05, 0.2, 3)
        q = UnitOrientation.from_axis_angle([0, 0, 1], math.pi)
        with pytest.raises(AntiparallelHeadings):
            bend_between(QI, q, wide)

    @given(st.tuples(*[st.floats(-1.0, 1.0) for _ in range(4)]).filter(
        lambda t: sum(c * c for c in t) > 1e-4
    ))
    @settings(max_examples=60)
    def test_self_bend_is_zero_including_double_cover(self, wxyz):
        g = RobotGeometry(0.066, 0.076, 15)
        q = UnitOrientation(*wxyz)
        neg = UnitOrientation(-wxyz[0], -wxyz[1], -wxyz[2], -wxyz[3])
        assert bend_between(q, q, g).theta_rad == 0.0
        assert bend_between(q, neg, g).theta_rad == 0.0

    def test_twist_does_not_bend(self, geom):
        twisted = UnitOrientation.from_axis_angle([1, 0, 0], 0.5)
        assert bend_between(QI, twisted, geom).theta_rad == 0.0


class TestSegmentForward:
    def test_straight(self, geom):
        end, kinks, bend = segment_forward(Pose.origin(), QI, geom)
        assert np.allclose(end.position, [0.076, 0, 0])
        assert kinks == []
        assert bend.is_straight

    def test_right_angle_midpoint(self, geom):
        end, kinks, _ = segment_forward(Pose.origin(), QZ90, geom)
        assert np.allclose(kinks[0], [0.012082, 0, 0], atol=1e-6)
        assert np.allclose(end.position, [0.012082, 0.012082, 0], atol=1e-6)

    def test_right_angle_location_zero(self, geom):
        end, kinks, _ = segment_forward(Pose.origin(), QZ90, geom, bend_location_m=0.0)
        assert np.allclose(kinks[0], [0, 0, 0])
        assert np.allclose(end.position, [0, 0.024164, 0], atol=1e-6)

    def test_location_out_of_range(self, geom):
        with pytest.raises(ValueError):
            segment_forward(Pose.origin(), QZ90, geom, bend_location_m=0.05)


class TestReconstructShape:
    def test_straight_fifteen_bands(self, geom):
        shape = reconstruct_shape([QI] * 15, geom)
        assert shape.band_count == 15
        assert np.allclose(shape.band_positions[-1], [14 * 0.076, 0, 0])
        # Collinear along +x with exact spacing.
        diffs = np.diff(shape.band_positions, axis=0)
        assert np.allclose(diffs, [[0.076, 0, 0]] * 14, atol=1e-12)

    def test_two_band_right_angle(self, geom2):
        shape = reconstruct_shape([QI, QZ90], geom2)
        end, kinks, _ = segment_forward(Pose.origin(), QZ90, geom2)
        assert np.allclose(shape.band_positions[1], end.position)
        assert np.allclose(shape.centerline[1], kinks[0])

    def test_too_few(self, geom2):
        with pytest.raises(EmptyInput):
            reconstruct_shape([QI], geom2)

    def test_count_mismatch(self, geom):
        with pytest.raises(LengthMismatch):
            reconstruct_shape([QI] * 10, geom)

    def test_infeasible_reports_segment(self, geom):
        qs = [QI] * 15
        qs[8] = UnitOrientation.from_axis_angle([0, 0, 1], math.radians(135))
        with pytest.raises(InfeasibleBend) as exc:
            reconstruct_shape(qs, geom)
        assert exc.value.segment == 7

    def test_base_override(self, geom):
        base = Pose(np.array([1.0, 2.0, 3.0]), QZ90)
        shape = reconstruct_shape([QI] * 15, geom, base=base)
        assert np.allclose(shape.band_positions[0], [1, 2, 3])
        # Base orientation is taken from the first reading, not the base pose.
        assert shape.band_poses[0].orientation == QI

    def test_straight_length_invariant(self, geom, rng):
        qs = random_feasible_orientations(15, geom, rng)
        shape = reconstruct_shape(qs, geom)
        pts = shape.centerline
        kinds = shape.point_kinds
        # Walk centerline summing straight runs per segment.
        seg = 0
        i = 0
        while seg < geom.segment_count:
            j = i + 1
            run = np.linalg.norm(pts[j] - pts[i])
            if kinds[j] == "kink":
                run += np.linalg.norm(pts[j + 1] - pts[j])
                j += 1
            expected = geom.band_spacing_m - shape.segment_bends[seg].arc_length_m
            assert run == pytest.approx(expected, abs=1e-9)
            i = j
            seg += 1

    def test_rigid_motion_equivariance(self, geom, rng):
        qs = random_feasible_orientations(15, geom, rng)
        shape = reconstruct_shape(qs, geom)
        rot = UnitOrientation.from_axis_angle([0.2, -1.0, 0.5], 1.234)
        shift = np.array([0.4, -0.2, 0.9])
        moved = [rot.compose(q) for q in qs]
        base = Pose(shift, rot)
        moved_shape = reconstruct_shape(moved, geom, base=base)
        expected = np.array([rot.rotate(p) + shift for p in shape.band_positions])
        assert np.allclose(moved_shape.band_positions, expected, atol=1e-9)

    def test_roundtrip_exactness(self, geom, rng):
        # Shapes generated with midpoint kinks reconstruct exactly.
        for _ in range(20):
            qs = random_feasible_orientations(15, geom, rng, twist_rad=0.3)
            generated = reconstruct_shape(qs, geom)
            again = reconstruct_shape(
                [p.orientation for p in generated.band_poses], geom
            )
            err = np.linalg.norm(
                generated.band_positions - again.band_positions, axis=1
            ).max()
            assert err < 1e-9

    def test_centerline_spacing_bound(self, geom, rng):
        qs = random_feasible_orientations(15, geom, rng)
        shape = reconstruct_shape(qs, geom)
        gaps = np.linalg.norm(np.diff(shape.centerline, axis=0), axis=1)
        assert np.all(gaps <= geom.band_spacing_m + 1e-12)


class TestRelativeRoll:
    def test_identity(self):
        assert relative_roll(QI, QI) == 0.0

    def test_pure_twist_about_heading(self):
        q_i = UnitOrientation.from_axis_angle([0, 1, 0], 0.8)
        roll = UnitOrientation.from_axis_angle(q_i.heading(), math.radians(30))
        q_j = roll.compose(q_i)
        assert relative_roll(q_i, q_j) == pytest.approx(math.radians(30))

    def test_pure_swing_has_zero_roll(self):
        q_i = UnitOrientation.from_axis_angle([0, 0, 1], 0.3)
        axis = np.cross(q_i.heading(), [0, 0, 1.0])
        swing = UnitOrientation.from_axis_angle(axis, math.pi / 2)
        q_j = swing.compose(q_i)
        assert relative_roll(q_i, q_j) == pytest.approx(0.0, abs=1e-12)

    def test_antiparallel_rejected(self):
        q_j = UnitOrientation.from_axis_angle([0, 0, 1], math.pi)
        with pytest.raises(AntiparallelHeadings):
            relative_roll(QI, q_j)


def test_heading_from_orientation_custom_forward():
    q = UnitOrientation.from_axis_angle([0, 0, 1], math.pi / 2)
    assert np.allclose(heading_from_orientation(q, [0, 1, 0]), [-1, 0, 0], atol=1e-15)

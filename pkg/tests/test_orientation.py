import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from bandsense.orientation import FORWARD_AXIS, UnitOrientation, twist_about

unit_quats = st.tuples(
    *[st.floats(-1.0, 1.0, allow_nan=False) for _ in range(4)]
).filter(lambda t: sum(c * c for c in t) > 1e-4)


def to_scipy(q: UnitOrientation) -> Rotation:
    return Rotation.from_quat([q.x, q.y, q.z, q.w])


class TestConstruction:
    def test_normalizes(self):
        q = UnitOrientation(2.0, 0.0, 0.0, 0.0)
        assert q.w == 1.0

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            UnitOrientation(0.0, 0.0, 0.0, 0.0)

    def test_double_cover_canonicalized(self):
        q = UnitOrientation(0.5, -0.5, 0.5, -0.5)
        neg = UnitOrientation(-0.5, 0.5, -0.5, 0.5)
        assert q == neg

    def test_negative_leading_zero_w(self):
        # w == 0: the first nonzero component decides the sign.
        q = UnitOrientation(0.0, -1.0, 0.0, 0.0)
        assert q.x == 1.0

    def test_construction_idempotent(self):
        q = UnitOrientation.from_axis_angle([0.3, -1.2, 0.4], 1.1)
        again = UnitOrientation(q.w, q.x, q.y, q.z)
        assert (q.w, q.x, q.y, q.z) == (again.w, again.x, again.y, again.z)

    @given(unit_quats)
    @settings(max_examples=100)
    def test_unit_norm_invariant(self, wxyz):
        q = UnitOrientation(*wxyz)
        n = math.sqrt(q.w**2 + q.x**2 + q.y**2 + q.z**2)
        assert abs(n - 1.0) <= 1e-9


class TestHeading:
    def test_identity(self):
        assert np.allclose(UnitOrientation.identity().heading(), [1.0, 0.0, 0.0])

    def test_quarter_turn_about_z(self):
        q = UnitOrientation.from_axis_angle([0, 0, 1], math.pi / 2)
        assert np.allclose(q.heading(), [0.0, 1.0, 0.0], atol=1e-15)

    def test_eighth_turn_about_z(self):
        # Oracle: direct rotation-matrix evaluation of Rz(45 deg) @ x.
        q = UnitOrientation.from_axis_angle([0, 0, 1], math.pi / 4)
        expected = np.array([math.sqrt(2) / 2, math.sqrt(2) / 2, 0.0])
        assert np.allclose(q.heading(), expected, atol=1e-15)


class TestRotation:
    @given(unit_quats)
    @settings(max_examples=100)
    def test_rotate_matches_scipy(self, wxyz):
        q = UnitOrientation(*wxyz)
        v = np.array([0.3, -1.0, 2.0])
        assert np.allclose(q.rotate(v), to_scipy(q).apply(v), atol=1e-12)

    @given(unit_quats, unit_quats)
    @settings(max_examples=100)
    def test_compose_matches_scipy(self, a, b):
        qa, qb = UnitOrientation(*a), UnitOrientation(*b)
        ours = qa.compose(qb)
        theirs = to_scipy(qa) * to_scipy(qb)
        assert np.allclose(
            ours.rotate([1.0, 0.5, -0.25]), theirs.apply([1.0, 0.5, -0.25]), atol=1e-12
        )

    @given(unit_quats)
    @settings(max_examples=50)
    def test_rotate_preserves_norm(self, wxyz):
        q = UnitOrientation(*wxyz)
        v = np.array([1.0, -2.0, 0.5])
        assert np.isclose(np.linalg.norm(q.rotate(v)), np.linalg.norm(v))

    def test_inverse_roundtrip(self):
        q = UnitOrientation.from_axis_angle([1, 2, -1], 0.7)
        v = np.array([0.1, 0.2, 0.3])
        assert np.allclose(q.inverse().rotate(q.rotate(v)), v, atol=1e-14)


class TestTwist:
    def test_pure_twist(self):
        q = UnitOrientation.from_axis_angle(FORWARD_AXIS, 0.4)
        assert twist_about(q, FORWARD_AXIS) == pytest.approx(0.4)

    def test_negative_twist(self):
        q = UnitOrientation.from_axis_angle(FORWARD_AXIS, -0.4)
        assert twist_about(q, FORWARD_AXIS) == pytest.approx(-0.4)

    def test_pure_swing_has_no_twist(self):
        q = UnitOrientation.from_axis_angle([0, 1, 0], 1.2)
        assert twist_about(q, FORWARD_AXIS) == pytest.approx(0.0)

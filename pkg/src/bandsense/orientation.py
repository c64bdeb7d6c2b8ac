"""Unit-quaternion orientation type and rotation helpers.

Conventions
-----------
- Quaternions are scalar-first ``(w, x, y, z)`` and use the Hamilton product.
- The body "forward" axis that defines a band's heading is +x in the band
  frame (``FORWARD_AXIS``).
- A quaternion and its negation represent the same physical rotation.  On
  construction we canonicalize the sign (first nonzero component positive)
  so equal orientations compare equal componentwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Body-frame axis whose world-frame image is the band heading.
FORWARD_AXIS = np.array([1.0, 0.0, 0.0])

# Norm tolerance enforced after normalization.
UNIT_TOL = 1e-9


def _canonical_sign(w, x, y, z):
    for c in (w, x, y, z):
        if c > 0.0:
            return 1.0
        if c < 0.0:
            return -1.0
    return 1.0


@dataclass(frozen=True)
class UnitOrientation:
    """An absolute 3D orientation stored as a canonical unit quaternion."""

    w: float
    x: float
    y: float
    z: float

    def __post_init__(self):
        n = math.sqrt(self.w**2 + self.x**2 + self.y**2 + self.z**2)
        if n == 0.0:
            raise ValueError("zero quaternion has no orientation")
        # Skip the division when already unit within tolerance so that
        # construction is idempotent (serialization round-trips bit-exactly).
        if abs(n - 1.0) <= UNIT_TOL:
            n = 1.0
        s = _canonical_sign(self.w, self.x, self.y, self.z) / n
        object.__setattr__(self, "w", self.w * s)
        object.__setattr__(self, "x", self.x * s)
        object.__setattr__(self, "y", self.y * s)
        object.__setattr__(self, "z", self.z * s)

    @classmethod
    def identity(cls) -> "UnitOrientation":
        return cls(1.0, 0.0, 0.0, 0.0)

    @classmethod
    def from_wxyz(cls, seq) -> "UnitOrientation":
        w, x, y, z = (float(c) for c in seq)
        return cls(w, x, y, z)

    @classmethod
    def from_axis_angle(cls, axis, angle_rad: float) -> "UnitOrientation":
        axis = np.asarray(axis, dtype=float)
        n = np.linalg.norm(axis)
        if n == 0.0:
            raise ValueError("rotation axis must be nonzero")
        h = 0.5 * angle_rad
        s = math.sin(h) / n
        return cls(math.cos(h), axis[0] * s, axis[1] * s, axis[2] * s)

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def compose(self, other: "UnitOrientation") -> "UnitOrientation":
        """Hamilton product self * other (apply ``other`` first)."""
        w1, x1, y1, z1 = self.w, self.x, self.y, self.z
        w2, x2, y2, z2 = other.w, other.x, other.y, other.z
        return UnitOrientation(
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        )

    def __matmul__(self, other: "UnitOrientation") -> "UnitOrientation":
        return self.compose(other)

    def inverse(self) -> "UnitOrientation":
        return UnitOrientation(self.w, -self.x, -self.y, -self.z)

    def rotate(self, v) -> np.ndarray:
        """Rotate a world-frame 3-vector by this orientation."""
        v0, v1, v2 = (float(c) for c in v)
        x, y, z = self.x, self.y, self.z
        # v + w * t + qv x t with t = 2 * (qv x v), written out component-wise
        # (np.cross dominates reconstruction time at this call rate).
        t0 = 2.0 * (y * v2 - z * v1)
        t1 = 2.0 * (z * v0 - x * v2)
        t2 = 2.0 * (x * v1 - y * v0)
        w = self.w
        return np.array(
            [
                v0 + w * t0 + (y * t2 - z * t1),
                v1 + w * t1 + (z * t0 - x * t2),
                v2 + w * t2 + (x * t1 - y * t0),
            ]
        )

    def heading(self) -> np.ndarray:
        """World-frame direction of the body forward axis."""
        return self.rotate(FORWARD_AXIS)

    def angle_to(self, other: "UnitOrientation") -> float:
        """Rotation angle in [0, pi] between two orientations (double-cover safe)."""
        dot = abs(
            self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
        )
        return 2.0 * math.acos(min(1.0, dot))

    def isclose(self, other: "UnitOrientation", tol: float = 1e-12) -> bool:
        return self.angle_to(other) <= tol


def twist_about(q: UnitOrientation, axis) -> float:
    """Signed twist angle of ``q`` about a unit ``axis`` (swing-twist split).

    Returns the angle in (-pi, pi] of the twist factor when ``q`` is
    decomposed as swing * twist with the twist axis ``axis``.
    """
    axis = np.asarray(axis, dtype=float)
    proj = q.x * axis[0] + q.y * axis[1] + q.z * axis[2]
    angle = 2.0 * math.atan2(proj, q.w)
    # atan2 over the canonical (w >= 0 favored) quaternion gives (-pi, pi];
    # fold the open edge case -pi onto pi.
    if angle <= -math.pi:
        angle += 2.0 * math.pi
    return angle

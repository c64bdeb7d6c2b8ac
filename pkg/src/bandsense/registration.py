"""Plane projection, first-segment registration, and position-error metrics.

Registration follows the evaluation procedure for planar ground truth:
translate the estimate so the first band centers coincide, then rotate in
the plane until the band-0 to band-1 vectors align.  A 3D variant aligns the
first-segment vectors by the minimal rotation and can additionally solve the
roll about that vector by least squares over the remaining bands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSegment, LengthMismatch, TooFewPoints

DEGENERATE_TOL = 1e-9


@dataclass(frozen=True)
class GroundTruthShape:
    """Digitized band centers (and optional inter-band midpoints) in meters."""

    band_points: np.ndarray
    midpoints: np.ndarray | None = None
    frame_note: str = ""

    def __post_init__(self):
        pts = np.asarray(self.band_points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 2:
            raise TooFewPoints("ground truth needs at least 2 band points")
        object.__setattr__(self, "band_points", pts)
        if self.midpoints is not None:
            mids = np.asarray(self.midpoints, dtype=float)
            if mids.shape[0] != pts.shape[0] - 1:
                raise LengthMismatch(
                    f"{mids.shape[0]} midpoints for {pts.shape[0]} band points"
                )
            object.__setattr__(self, "midpoints", mids)

    @property
    def band_count(self) -> int:
        return self.band_points.shape[0]


@dataclass(frozen=True)
class ErrorReport:
    """Per-band Euclidean position errors against ground truth."""

    per_band_error_m: np.ndarray
    max_error_m: float
    argmax_band: int

    def __post_init__(self):
        object.__setattr__(
            self, "per_band_error_m", np.asarray(self.per_band_error_m, dtype=float)
        )


def plane_basis(plane_normal) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic right-handed in-plane basis (e1, e2) for a unit normal.

    The reference direction is world +x unless the normal is nearly parallel
    to it, in which case +y is used; e1 is the normalized in-plane component
    of the reference and e2 = normal x e1.  For normal = +z this gives the
    standard (x, y) axes.
    """
    n = np.asarray(plane_normal, dtype=float)
    n = n / np.linalg.norm(n)
    ref = np.array([1.0, 0.0, 0.0])
    if abs(float(np.dot(n, ref))) > 0.9:
        ref = np.array([0.0, 1.0, 0.0])
    e1 = ref - float(np.dot(ref, n)) * n
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    return e1, e2


def project_to_plane(points, plane_normal) -> np.ndarray:
    """Orthogonal projection of (n, 3) points into a plane, as (n, 2)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    e1, e2 = plane_basis(plane_normal)
    return np.stack([pts @ e1, pts @ e2], axis=1)


def register_first_segment(estimate, truth) -> np.ndarray:
    """Rigidly align a 2D estimate polyline to 2D truth via the first segment.

    Translation moves estimate point 0 onto truth point 0; rotation about
    that point aligns the 0 -> 1 directions.  No scaling or reflection.
    """
    est = np.asarray(estimate, dtype=float)
    tru = np.asarray(truth, dtype=float)
    if est.shape[0] < 2 or tru.shape[0] < 2:
        raise TooFewPoints("both polylines need at least 2 points")
    v_e = est[1] - est[0]
    v_t = tru[1] - tru[0]
    if np.linalg.norm(v_e) < DEGENERATE_TOL or np.linalg.norm(v_t) < DEGENERATE_TOL:
        raise DegenerateSegment("first two points coincide; no alignment direction")
    ang = math.atan2(v_t[1], v_t[0]) - math.atan2(v_e[1], v_e[0])
    c, s = math.cos(ang), math.sin(ang)
    rot = np.array([[c, -s], [s, c]])
    return (est - est[0]) @ rot.T + tru[0]


def _axis_rotation_matrix(axis: np.ndarray, angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    k = np.array(
        [[0.0, -axis[2], axis[1]], [axis[2], 0.0, -axis[0]], [-axis[1], axis[0], 0.0]]
    )
    return np.eye(3) + s * k + (1.0 - c) * (k @ k)


def register_first_segment_3d(estimate, truth, optimize_roll: bool = True) -> np.ndarray:
    """3D analogue of first-segment registration.

    The 0 -> 1 vectors are aligned by the minimal rotation; with
    ``optimize_roll`` the remaining degree of freedom (roll about the aligned
    vector) is chosen by least squares over the other points.  This extends
    the planar procedure and is used for non-planar scenes.
    """
    est = np.asarray(estimate, dtype=float)
    tru = np.asarray(truth, dtype=float)
    if est.shape[0] < 2 or tru.shape[0] < 2:
        raise TooFewPoints("both polylines need at least 2 points")
    v_e = est[1] - est[0]
    v_t = tru[1] - tru[0]
    ne, nt = np.linalg.norm(v_e), np.linalg.norm(v_t)
    if ne < DEGENERATE_TOL or nt < DEGENERATE_TOL:
        raise DegenerateSegment("first two points coincide; no alignment direction")
    u_e, u_t = v_e / ne, v_t / nt
    cross = np.cross(u_e, u_t)
    sin_a = np.linalg.norm(cross)
    cos_a = float(np.dot(u_e, u_t))
    if sin_a < 1e-12:
        if cos_a > 0.0:
            rot = np.eye(3)
        else:
            # Antiparallel: rotate pi about a deterministic perpendicular.
            perp = np.cross(u_e, [1.0, 0.0, 0.0])
            if np.linalg.norm(perp) < 1e-6:
                perp = np.cross(u_e, [0.0, 1.0, 0.0])
            perp /= np.linalg.norm(perp)
            rot = _axis_rotation_matrix(perp, math.pi)
    else:
        rot = _axis_rotation_matrix(cross / sin_a, math.atan2(sin_a, cos_a))

    pts = (est - est[0]) @ rot.T
    if optimize_roll and est.shape[0] > 2:
        rel_t = tru - tru[0]
        # Components perpendicular to the aligned axis determine the roll.
        para = pts @ u_t
        perp = pts - para[:, None] * u_t
        perp_t = rel_t - (rel_t @ u_t)[:, None] * u_t
        w = np.cross(u_t, perp)
        num = float(np.sum(perp_t * w))
        den = float(np.sum(perp_t * perp))
        if abs(num) > 0.0 or abs(den) > 0.0:
            roll = math.atan2(num, den)
            pts = pts @ _axis_rotation_matrix(u_t, roll).T
    return pts + tru[0]


def position_errors(estimate, truth) -> ErrorReport:
    """Per-band Euclidean errors between corresponding points."""
    est = np.asarray(estimate, dtype=float)
    if isinstance(truth, GroundTruthShape):
        tru = truth.band_points
    else:
        tru = np.asarray(truth, dtype=float)
    if est.shape != tru.shape:
        raise LengthMismatch(
            f"estimate shape {est.shape} != truth shape {tru.shape}"
        )
    errs = np.linalg.norm(est - tru, axis=1)
    idx = int(np.argmax(errs))
    return ErrorReport(errs, float(errs[idx]), idx)


def point_to_polyline_distance(points, polyline) -> np.ndarray:
    """Distance of each point to the nearest point on a polyline."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    line = np.asarray(polyline, dtype=float)
    a = line[:-1]
    b = line[1:]
    ab = b - a
    ab_len2 = np.sum(ab * ab, axis=1)
    ab_len2[ab_len2 == 0.0] = 1.0
    out = np.empty(pts.shape[0])
    for i, p in enumerate(pts):
        t = np.clip(np.sum((p - a) * ab, axis=1) / ab_len2, 0.0, 1.0)
        proj = a + t[:, None] * ab
        out[i] = np.min(np.linalg.norm(proj - p, axis=1))
    return out

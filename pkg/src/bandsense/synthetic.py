"""Builders for synthetic shapes and scenarios.

These generate ground-truth postures (scripted or random), wrap them into
simulator scenarios, and are the source of every oracle trajectory used in
the tests and demos.
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import Pose, RobotGeometry, reconstruct_shape
from .orientation import UnitOrientation
from .sim import FieldSource, Scenario, static_scenario

DEFAULT_GEOMETRY = RobotGeometry(diameter_m=0.066, band_spacing_m=0.076, band_count=15)


def _heading_frame(q: UnitOrientation):
    """Orthonormal (n1, n2) completing the current heading to a frame."""
    h = q.heading()
    ref = np.array([0.0, 0.0, 1.0])
    if abs(float(np.dot(h, ref))) > 0.9:
        ref = np.array([0.0, 1.0, 0.0])
    n1 = np.cross(h, ref)
    n1 /= np.linalg.norm(n1)
    n2 = np.cross(h, n1)
    return n1, n2


def orientations_from_bends(bend_script, start: UnitOrientation | None = None) -> list:
    """Chain scripted bends into an orientation sequence.

    ``bend_script`` holds (theta_rad, plane_angle_rad) per segment: the bend
    axis is perpendicular to the current heading, rotated by plane_angle
    within the normal plane, so differing plane angles give non-coplanar
    paths.
    """
    q = start or UnitOrientation.identity()
    out = [q]
    for theta, plane_angle in bend_script:
        if theta > 0.0:
            n1, n2 = _heading_frame(q)
            axis = math.cos(plane_angle) * n1 + math.sin(plane_angle) * n2
            q = UnitOrientation.from_axis_angle(axis, theta).compose(q)
        out.append(q)
    return out


def random_feasible_orientations(
    n_bands: int,
    geom: RobotGeometry,
    rng: np.random.Generator,
    max_theta_rad: float = math.pi / 2,
    twist_rad: float = 0.0,
) -> list:
    """Random orientation sequence whose every bend fits the geometry."""
    cap = min(max_theta_rad, geom.max_bend_rad)
    script = [
        (rng.uniform(0.0, cap), rng.uniform(0.0, 2.0 * math.pi))
        for _ in range(n_bands - 1)
    ]
    out = orientations_from_bends(script)
    if twist_rad > 0.0:
        twisted = [out[0]]
        for q in out[1:]:
            roll = rng.uniform(-twist_rad, twist_rad)
            twisted.append(
                UnitOrientation.from_axis_angle(q.heading(), roll).compose(q)
            )
        out = twisted
    return out


def pipe_orientations() -> list:
    """Band orientations for the constrained-pipe posture.

    A 15-band run traversing two 22.5 degree bends and two 45 degree bends
    in different planes.
    """
    script = [(0.0, 0.0)] * 14
    script[3] = (math.radians(22.5), 0.0)
    script[6] = (math.radians(45.0), math.radians(70.0))
    script[9] = (math.radians(45.0), math.radians(-55.0))
    script[12] = (math.radians(22.5), math.radians(140.0))
    return orientations_from_bends(script)


def pipe_scenario(
    geom: RobotGeometry = DEFAULT_GEOMETRY,
    duration_s: float = 1.0,
    seed: int = 0,
) -> Scenario:
    """Noise-free static scenario posed along the pipe path."""
    shape = reconstruct_shape(pipe_orientations(), geom)
    return static_scenario(
        geom,
        shape.band_poses,
        duration_s,
        heading_noise_rad=0.0,
        seed=seed,
    )


def straight_poses(geom: RobotGeometry, origin=(0.0, 0.0, 0.0)) -> list:
    """Bands in a straight line along +x."""
    q = UnitOrientation.identity()
    base = np.asarray(origin, dtype=float)
    return [
        Pose(base + np.array([b * geom.band_spacing_m, 0.0, 0.0]), q)
        for b in range(geom.band_count)
    ]


def three_leak_scenario(
    geom: RobotGeometry = DEFAULT_GEOMETRY,
    target_bands=(2, 7, 12),
    target_thermistors=(0, 2, 1),
    seed: int = 0,
) -> Scenario:
    """Straight robot with three sequential directional heat sources.

    Source i switches on in its own time window, aimed at the radial of one
    thermistor of one band from 5 cm away.
    """
    poses = straight_poses(geom)
    scenario = static_scenario(
        geom,
        poses,
        duration_s=2.0 + 4.0 * len(target_bands),
        heading_noise_rad=0.0,
        seed=seed,
    )
    layout = scenario.layout
    standoff = 0.05
    for i, (band, ch) in enumerate(zip(target_bands, target_thermistors)):
        radial = poses[band].orientation.rotate(layout.radial_body(ch))
        pos = poses[band].position + (0.5 * geom.diameter_m + standoff) * radial
        t0 = 2.0 + 4.0 * i
        scenario.heat_sources.append(
            FieldSource(pos, strength=30.0, falloff_m=0.06, t_start_s=t0, t_end_s=t0 + 3.0)
        )
        scenario.humidity_sources.append(
            FieldSource(pos, strength=25.0, falloff_m=0.10, t_start_s=t0, t_end_s=t0 + 3.0)
        )
    return scenario


def null_scenario(
    geom: RobotGeometry = DEFAULT_GEOMETRY,
    duration_s: float = 1.0,
    seed: int = 0,
) -> Scenario:
    """Straight robot, no sources, no noise, no failures."""
    return static_scenario(
        geom,
        straight_poses(geom),
        duration_s,
        heading_noise_rad=0.0,
        seed=seed,
    )

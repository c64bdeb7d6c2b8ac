"""Scikit-learn style wrappers around the geometric core.

These let the reconstruction and uncertainty steps slot into sklearn
pipelines and parameter searches: parameters live in ``__init__`` verbatim,
``fit`` validates and freezes derived state on ``*_``-suffixed attributes,
and ``get_params``/``set_params``/``clone`` come from BaseEstimator.

X is an (n_bands, 4) array of wxyz quaternion rows (or a sequence of
UnitOrientation); one "sample" is one full robot posture.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .geometry import Pose, RobotGeometry, reconstruct_shape
from .uncertainty import McConfig, sample_shapes
from .validation import check_orientation_array, check_positive


class ShapeReconstructor(BaseEstimator, TransformerMixin):
    """Stateless transformer: band orientations -> band center positions.

    ``transform`` returns the (n_bands, 3) reconstructed band positions;
    ``reconstruct`` returns the full ShapeEstimate with kink points.
    """

    def __init__(self, diameter_m=0.066, band_spacing_m=0.076):
        self.diameter_m = diameter_m
        self.band_spacing_m = band_spacing_m

    def fit(self, X=None, y=None):
        check_positive("diameter_m", self.diameter_m)
        check_positive("band_spacing_m", self.band_spacing_m)
        if X is not None:
            n_bands = len(X)
        else:
            n_bands = 2
        self.geometry_ = RobotGeometry(self.diameter_m, self.band_spacing_m, n_bands)
        return self

    def _geometry_for(self, X) -> RobotGeometry:
        if not hasattr(self, "geometry_"):
            raise NotFittedError("call fit before transform")
        if self.geometry_.band_count != len(X):
            return RobotGeometry(self.diameter_m, self.band_spacing_m, len(X))
        return self.geometry_

    def reconstruct(self, X, base: Pose | None = None):
        orientations = check_orientation_array(X)
        return reconstruct_shape(orientations, self._geometry_for(orientations), base)

    def transform(self, X):
        return self.reconstruct(X).band_positions


class ShapeUncertaintyEstimator(BaseEstimator):
    """Monte Carlo shape-cloud sampler with the published defaults.

    After ``fit(X)``, ``cloud_`` holds the ensemble, ``stats_`` the per-band
    spread, and ``predict(X)`` returns the nominal band positions.
    """

    def __init__(
        self,
        diameter_m=0.066,
        band_spacing_m=0.076,
        n_samples=2000,
        angle_error_deg=3.0,
        vary_bend_location=True,
        seed=0,
        percentile=0.95,
        workers=1,
    ):
        self.diameter_m = diameter_m
        self.band_spacing_m = band_spacing_m
        self.n_samples = n_samples
        self.angle_error_deg = angle_error_deg
        self.vary_bend_location = vary_bend_location
        self.seed = seed
        self.percentile = percentile
        self.workers = workers

    def fit(self, X, y=None):
        orientations = check_orientation_array(X)
        geom = RobotGeometry(self.diameter_m, self.band_spacing_m, len(orientations))
        cfg = McConfig(
            n_samples=self.n_samples,
            angle_error_bound_rad=math.radians(self.angle_error_deg),
            vary_bend_location=self.vary_bend_location,
            seed=self.seed,
        )
        self.cloud_ = sample_shapes(
            orientations, geom, cfg, percentile=self.percentile, workers=self.workers
        )
        self.stats_ = self.cloud_.per_band_stats
        self.geometry_ = geom
        return self

    def predict(self, X):
        """Nominal (midpoint-placement) band positions for new orientations."""
        orientations = check_orientation_array(X)
        geom = RobotGeometry(self.diameter_m, self.band_spacing_m, len(orientations))
        return reconstruct_shape(orientations, geom).band_positions

    @property
    def max_radii_(self) -> np.ndarray:
        if not hasattr(self, "stats_"):
            raise NotFittedError("call fit first")
        return np.array([s.max_radius_m for s in self.stats_])

import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import Pipeline

from bandsense.estimators import ShapeReconstructor, ShapeUncertaintyEstimator
from bandsense.geometry import RobotGeometry, reconstruct_shape
from bandsense.orientation import UnitOrientation
from bandsense.synthetic import pipe_orientations
from bandsense.uncertainty import McConfig, sample_shapes
from bandsense.validation import check_orientation_array, check_positive

QI = UnitOrientation.identity()


def quat_rows(orientations):
    return np.array([[q.w, q.x, q.y, q.z] for q in orientations])


class TestValidation:
    def test_accepts_orientations_unchanged(self):
        qs = [QI, QI]
        assert check_orientation_array(qs) == qs

    def test_accepts_wxyz_rows(self):
        out = check_orientation_array([[1.0, 0, 0, 0], [0.0, 0, 0, 1.0]])
        assert all(isinstance(q, UnitOrientation) for q in out)

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError):
            check_orientation_array(np.zeros((3, 3)))

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            check_orientation_array([[1.0, 0, 0, np.nan]])

    def test_check_positive(self):
        check_positive("x", 1.0)
        with pytest.raises(ValueError):
            check_positive("x", 0.0)


class TestShapeReconstructor:
    def test_get_set_params(self):
        est = ShapeReconstructor(diameter_m=0.05, band_spacing_m=0.09)
        params = est.get_params()
        assert params == {"diameter_m": 0.05, "band_spacing_m": 0.09}
        est.set_params(diameter_m=0.066)
        assert est.diameter_m == 0.066

    def test_clone(self):
        est = ShapeReconstructor(band_spacing_m=0.1)
        assert clone(est).get_params() == est.get_params()

    def test_transform_matches_core(self, geom):
        qs = pipe_orientations()
        est = ShapeReconstructor().fit(qs)
        expected = reconstruct_shape(qs, geom).band_positions
        assert np.array_equal(est.transform(qs), expected)

    def test_accepts_quaternion_rows(self, geom):
        qs = pipe_orientations()
        est = ShapeReconstructor().fit(quat_rows(qs))
        expected = reconstruct_shape(qs, geom).band_positions
        assert np.allclose(est.transform(quat_rows(qs)), expected, atol=1e-12)

    def test_reconstruct_full_estimate(self, geom):
        est = ShapeReconstructor().fit(pipe_orientations())
        shape = est.reconstruct(pipe_orientations())
        assert shape.band_count == 15
        assert len(shape.segment_bends) == 14

    def test_not_fitted(self):
        with pytest.raises(NotFittedError):
            ShapeReconstructor().transform([QI, QI])

    def test_fit_validates_params(self):
        with pytest.raises(ValueError):
            ShapeReconstructor(diameter_m=-1.0).fit([QI, QI])

    def test_band_count_adapts_to_input(self):
        est = ShapeReconstructor().fit([QI] * 15)
        out = est.transform([QI] * 4)
        assert out.shape == (4, 3)

    def test_pipeline(self, geom):
        pipe = Pipeline([("shape", ShapeReconstructor())])
        out = pipe.fit_transform(pipe_orientations())
        assert out.shape == (15, 3)


class TestShapeUncertaintyEstimator:
    def test_default_params_match_published_protocol(self):
        p = ShapeUncertaintyEstimator().get_params()
        assert p["n_samples"] == 2000
        assert p["angle_error_deg"] == 3.0
        assert p["vary_bend_location"] is True
        assert p["percentile"] == 0.95

    def test_clone_preserves_params(self):
        est = ShapeUncertaintyEstimator(n_samples=10, seed=7)
        assert clone(est).get_params() == est.get_params()

    def test_fit_sets_state(self, geom):
        est = ShapeUncertaintyEstimator(n_samples=50, seed=1).fit(pipe_orientations())
        assert est.cloud_.n_samples == 50
        assert len(est.stats_) == 15
        assert est.geometry_.band_count == 15
        assert est.max_radii_.shape == (15,)

    def test_fit_matches_direct_sampling(self, geom):
        qs = pipe_orientations()
        est = ShapeUncertaintyEstimator(n_samples=40, seed=3).fit(qs)
        cfg = McConfig(
            n_samples=40,
            angle_error_bound_rad=math.radians(3.0),
            vary_bend_location=True,
            seed=3,
        )
        direct = sample_shapes(qs, geom, cfg)
        assert np.array_equal(est.cloud_.band_positions, direct.band_positions)

    def test_predict_is_nominal_reconstruction(self, geom):
        qs = pipe_orientations()
        est = ShapeUncertaintyEstimator(n_samples=5, seed=0).fit(qs)
        assert np.array_equal(
            est.predict(qs), reconstruct_shape(qs, geom).band_positions
        )

    def test_not_fitted(self):
        with pytest.raises(NotFittedError):
            ShapeUncertaintyEstimator().max_radii_

    def test_workers_do_not_change_fit(self):
        qs = pipe_orientations()
        a = ShapeUncertaintyEstimator(n_samples=31, seed=9, workers=1).fit(qs)
        b = ShapeUncertaintyEstimator(n_samples=31, seed=9, workers=4).fit(qs)
        assert np.array_equal(a.cloud_.band_positions, b.cloud_.band_positions)

    def test_custom_geometry_params(self):
        est = ShapeUncertaintyEstimator(
            diameter_m=0.05, band_spacing_m=0.09, n_samples=5
        ).fit([QI] * 4)
        assert est.geometry_ == RobotGeometry(0.05, 0.09, 4)

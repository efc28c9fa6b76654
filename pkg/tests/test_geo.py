"""Tests for calibration fitting, feature expansion, and haversine distances."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from airside.geo import (
    EARTH_RADIUS_M,
    CalibrationModel,
    DegenerateGeometryError,
    GeoPoint,
    InsufficientDataError,
    PixelPoint,
    PixelNormalizer,
    expand_features,
    feature_count,
    fit_calibration,
    haversine_distance,
    load_model,
    pixel_to_geo,
    save_model,
)


def brute_force_features(x1, x2, degree):
    """Direct enumeration of the double sum, independent of expand_features."""
    out = []
    for i in range(degree + 1):
        for j in range(i + 1):
            out.append(x1**j * x2 ** (i - j))
    return out


class TestExpandFeatures:
    def test_degree_zero(self):
        assert list(expand_features((0.37, -0.9), 0)) == [1.0]

    def test_degree_one_ordering(self):
        a, b = 0.25, -0.5
        assert list(expand_features((a, b), 1)) == [1.0, b, a]

    def test_degree_five_length(self):
        assert len(expand_features((0.1, 0.2), 5)) == 21

    @given(
        st.floats(-1, 1), st.floats(-1, 1), st.integers(min_value=0, max_value=8)
    )
    def test_matches_brute_force_enumeration(self, x1, x2, degree):
        got = expand_features((x1, x2), degree)
        expected = brute_force_features(x1, x2, degree)
        assert len(got) == feature_count(degree)
        assert np.allclose(got, expected)


class TestFitCalibration:
    def _grid_pixels(self, n, width=1920, height=1080, seed=0):
        rng = np.random.default_rng(seed)
        return [
            PixelPoint(rng.uniform(0, width), rng.uniform(0, height)) for _ in range(n)
        ]

    def _polynomial_labels(self, pixels, degree, seed=1, scale=0.01):
        """Labels from a random polynomial of the normalized pixels."""
        rng = np.random.default_rng(seed)
        norm = PixelNormalizer.for_frame(1920, 1080)
        coeffs = rng.uniform(-scale, scale, size=(2, feature_count(degree)))
        labels = []
        for p in pixels:
            f = expand_features(norm.normalize(p), degree)
            labels.append(GeoPoint(1.35 + float(coeffs[0] @ f), 104.0 + float(coeffs[1] @ f)))
        return labels

    def test_recovers_in_class_polynomial(self):
        pixels = self._grid_pixels(100)
        labels = self._polynomial_labels(pixels, degree=3)
        model = fit_calibration(pixels, labels, 5, (1920, 1080))
        spread = max(
            max(g.lat for g in labels) - min(g.lat for g in labels),
            max(g.lon for g in labels) - min(g.lon for g in labels),
        )
        for p, g in zip(pixels, labels):
            pred = pixel_to_geo(model, p)
            assert abs(pred.lat - g.lat) / spread < 1e-6
            assert abs(pred.lon - g.lon) / spread < 1e-6
        assert model.fit_rmse_meters < 1e-6 * spread * 111_000

    def test_insufficient_data(self):
        pixels = self._grid_pixels(feature_count(5) - 1)
        labels = self._polynomial_labels(pixels, degree=1)
        with pytest.raises(InsufficientDataError):
            fit_calibration(pixels, labels, 5, (1920, 1080))

    def test_collinear_points_degenerate(self):
        pixels = [PixelPoint(100.0 + 3.0 * i, 200.0 + 1.5 * i) for i in range(40)]
        labels = [GeoPoint(1.35 + 1e-5 * i, 104.0 + 2e-5 * i) for i in range(40)]
        with pytest.raises(DegenerateGeometryError):
            fit_calibration(pixels, labels, 5, (1920, 1080))

    def test_mismatched_lengths(self):
        pixels = self._grid_pixels(30)
        with pytest.raises(ValueError):
            fit_calibration(pixels, [GeoPoint(0, 0)] * 29, 2, (1920, 1080))

    def test_affine_interpolates_training_points(self):
        pixels = self._grid_pixels(60, seed=5)
        labels = [
            GeoPoint(1.0 + 1e-5 * p.u + 2e-5 * p.v, 100.0 + 3e-5 * p.u - 1e-5 * p.v)
            for p in pixels
        ]
        model = fit_calibration(pixels, labels, 5, (1920, 1080))
        for p, g in zip(pixels, labels):
            pred = pixel_to_geo(model, p)
            assert abs(pred.lat - g.lat) < 1e-9
            assert abs(pred.lon - g.lon) < 1e-9

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=0, max_value=5), st.integers(min_value=0, max_value=10_000))
    def test_hypothesis_class_closure(self, degree, seed):
        pixels = self._grid_pixels(60, seed=seed)
        labels = self._polynomial_labels(pixels, degree=degree, seed=seed + 1)
        model = fit_calibration(pixels, labels, 5, (1920, 1080))
        spread = max(
            max(abs(g.lat - 1.35) for g in labels),
            max(abs(g.lon - 104.0) for g in labels),
            1e-9,
        )
        worst = max(
            max(
                abs(pixel_to_geo(model, p).lat - g.lat),
                abs(pixel_to_geo(model, p).lon - g.lon),
            )
            for p, g in zip(pixels, labels)
        )
        assert worst / spread < 1e-6

    def test_determinism(self):
        pixels = self._grid_pixels(50)
        labels = self._polynomial_labels(pixels, degree=2)
        m1 = fit_calibration(pixels, labels, 5, (1920, 1080))
        m2 = fit_calibration(pixels, labels, 5, (1920, 1080))
        p = PixelPoint(123.456, 789.01)
        assert pixel_to_geo(m1, p) == pixel_to_geo(m2, p)

    def test_continuity_of_prediction(self):
        pixels = self._grid_pixels(80, seed=9)
        labels = self._polynomial_labels(pixels, degree=4, seed=10)
        model = fit_calibration(pixels, labels, 5, (1920, 1080))
        rng = np.random.default_rng(11)
        for _ in range(50):
            p = PixelPoint(rng.uniform(0, 1920), rng.uniform(0, 1080))
            q = PixelPoint(p.u + 1e-6, p.v - 1e-6)
            a, b = pixel_to_geo(model, p), pixel_to_geo(model, q)
            assert abs(a.lat - b.lat) < 1e-6
            assert abs(a.lon - b.lon) < 1e-6

    def test_model_roundtrip(self, tmp_path):
        pixels = self._grid_pixels(40)
        labels = self._polynomial_labels(pixels, degree=2)
        model = fit_calibration(pixels, labels, 5, (1920, 1080))
        path = tmp_path / "model.json"
        save_model(model, path)
        obj = json.loads(path.read_text())
        assert set(obj) == {"degree", "weights", "norm", "rmse_m"}
        assert set(obj["norm"]) == {"su", "ou", "sv", "ov"}
        loaded = load_model(path)
        p = PixelPoint(321.0, 654.0)
        assert pixel_to_geo(loaded, p) == pixel_to_geo(model, p)


class TestHaversine:
    def test_identity(self):
        p = GeoPoint(1.3521, 103.8198)
        assert haversine_distance(p, p) == 0.0

    def test_equator_one_degree_closed_form(self):
        # Closed-form oracle: one degree of arc on the equator is R * pi / 180.
        expected = EARTH_RADIUS_M * math.pi / 180.0
        got = haversine_distance(GeoPoint(0, 0), GeoPoint(0, 1))
        assert abs(got - expected) < 0.01

    def test_symmetry_random_pairs(self):
        rng = np.random.default_rng(17)
        for _ in range(1000):
            a = GeoPoint(rng.uniform(-80, 80), rng.uniform(-179, 179))
            b = GeoPoint(rng.uniform(-80, 80), rng.uniform(-179, 179))
            assert haversine_distance(a, b) == haversine_distance(b, a)

    def test_non_negative_and_distinct_positive(self):
        rng = np.random.default_rng(23)
        for _ in range(500):
            a = GeoPoint(rng.uniform(-80, 80), rng.uniform(-179, 179))
            b = GeoPoint(a.lat + rng.uniform(1e-9, 1e-3), a.lon + rng.uniform(1e-9, 1e-3))
            assert haversine_distance(a, b) > 0.0

    def test_triangle_inequality_local_patch(self):
        rng = np.random.default_rng(31)
        for _ in range(1000):
            lat0, lon0 = rng.uniform(-60, 60), rng.uniform(-179, 179)
            pts = [
                GeoPoint(lat0 + rng.uniform(-0.45, 0.45), lon0 + rng.uniform(-0.45, 0.45))
                for _ in range(3)
            ]
            ab = haversine_distance(pts[0], pts[1])
            bc = haversine_distance(pts[1], pts[2])
            ac = haversine_distance(pts[0], pts[2])
            assert ac <= ab + bc + 1e-6

    @given(
        st.floats(-85, 85), st.floats(-179, 179),
        st.floats(-85, 85), st.floats(-179, 179),
    )
    def test_symmetry_property(self, lat_a, lon_a, lat_b, lon_b):
        a, b = GeoPoint(lat_a, lon_a), GeoPoint(lat_b, lon_b)
        assert haversine_distance(a, b) == haversine_distance(b, a)


class TestTypes:
    def test_geopoint_range_validation(self):
        with pytest.raises(ValueError):
            GeoPoint(91.0, 0.0)
        with pytest.raises(ValueError):
            GeoPoint(0.0, 181.0)
        with pytest.raises(ValueError):
            GeoPoint(float("nan"), 0.0)

    def test_pixelpoint_finite(self):
        with pytest.raises(ValueError):
            PixelPoint(float("inf"), 0.0)

    def test_normalizer_nonzero_scale(self):
        with pytest.raises(ValueError):
            PixelNormalizer(su=0.0, ou=1.0, sv=1.0, ov=1.0)

    def test_model_shape_validation(self):
        with pytest.raises(ValueError):
            CalibrationModel(
                degree=5,
                weights=np.zeros((2, 20)),
                normalizer=PixelNormalizer.for_frame(1920, 1080),
                fit_rmse_meters=0.0,
            )

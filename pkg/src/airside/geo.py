"""Pixel-to-geographic calibration and great-circle distances.

A camera view is calibrated by regressing geographic coordinates onto a
polynomial expansion of normalized pixel coordinates. Distances between
geographic points use the haversine formula on a spherical Earth.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

# IUGG mean Earth radius.
EARTH_RADIUS_M = 6_371_008.8

METERS_PER_SECOND_TO_KNOTS = 1.9438445
METERS_TO_FEET = 3.280840

# Singular values below this (relative) threshold are treated as rank loss.
RANK_RCOND = 1e-10


class InsufficientDataError(ValueError):
    """Too few correspondences for the requested polynomial degree."""


class DegenerateGeometryError(ValueError):
    """Correspondence geometry is numerically rank-deficient."""


@dataclass(frozen=True)
class PixelPoint:
    """A point in image coordinates (u right, v down), in pixels."""

    u: float
    v: float

    def __post_init__(self):
        if not (math.isfinite(self.u) and math.isfinite(self.v)):
            raise ValueError(f"pixel point must be finite, got ({self.u}, {self.v})")


@dataclass(frozen=True)
class GeoPoint:
    """A geographic point in decimal degrees."""

    lat: float
    lon: float

    def __post_init__(self):
        if not (math.isfinite(self.lat) and math.isfinite(self.lon)):
            raise ValueError(f"geo point must be finite, got ({self.lat}, {self.lon})")
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"latitude out of range: {self.lat}")
        if not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"longitude out of range: {self.lon}")


@dataclass(frozen=True)
class PixelNormalizer:
    """Affine map taking frame pixels into [-1, 1] x [-1, 1]."""

    su: float
    ou: float
    sv: float
    ov: float

    def __post_init__(self):
        if self.su == 0.0 or self.sv == 0.0:
            raise ValueError("normalizer scales must be nonzero")

    @classmethod
    def for_frame(cls, width: float, height: float) -> "PixelNormalizer":
        return cls(su=width / 2.0, ou=width / 2.0, sv=height / 2.0, ov=height / 2.0)

    def normalize(self, p: PixelPoint) -> tuple[float, float]:
        return (p.u - self.ou) / self.su, (p.v - self.ov) / self.sv


def feature_count(degree: int) -> int:
    """Number of monomials of total degree <= degree in two variables."""
    return (degree + 1) * (degree + 2) // 2


def _monomial_exponents(degree: int) -> list[tuple[int, int]]:
    # (exponent of x1, exponent of x2) for i = 0..degree, j = 0..i -> x1^j * x2^(i-j)
    return [(j, i - j) for i in range(degree + 1) for j in range(i + 1)]


def expand_features(p: tuple[float, float], degree: int) -> np.ndarray:
    """Expand a normalized pixel point into its polynomial feature vector.

    Terms are enumerated as x1^j * x2^(i-j) for i = 0..degree, j = 0..i,
    giving a vector of length (degree+1)(degree+2)/2.
    """
    if degree < 0:
        raise ValueError("degree must be >= 0")
    x1, x2 = float(p[0]), float(p[1])
    return np.array([x1**a * x2**b for a, b in _monomial_exponents(degree)])


def _design_matrix(x1: np.ndarray, x2: np.ndarray, degree: int) -> np.ndarray:
    cols = [x1**a * x2**b for a, b in _monomial_exponents(degree)]
    return np.column_stack(cols)


@dataclass(frozen=True)
class CalibrationModel:
    """Fitted polynomial regression from pixels to geographic coordinates.

    ``weights`` has shape (2, T) with the latitude row first; inference is
    the plain weighted feature product with no residual term added.
    """

    degree: int
    weights: np.ndarray
    normalizer: PixelNormalizer
    fit_rmse_meters: float

    def __post_init__(self):
        expected = feature_count(self.degree)
        if self.weights.shape != (2, expected):
            raise ValueError(
                f"weights shape {self.weights.shape} does not match degree {self.degree}"
            )

    def predict(self, p: PixelPoint) -> GeoPoint:
        return pixel_to_geo(self, p)

    def to_json_obj(self) -> dict:
        return {
            "degree": self.degree,
            "weights": [list(map(float, row)) for row in self.weights],
            "norm": {
                "su": self.normalizer.su,
                "ou": self.normalizer.ou,
                "sv": self.normalizer.sv,
                "ov": self.normalizer.ov,
            },
            "rmse_m": self.fit_rmse_meters,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "CalibrationModel":
        norm = obj["norm"]
        return cls(
            degree=int(obj["degree"]),
            weights=np.asarray(obj["weights"], dtype=float),
            normalizer=PixelNormalizer(
                su=float(norm["su"]), ou=float(norm["ou"]),
                sv=float(norm["sv"]), ov=float(norm["ov"]),
            ),
            fit_rmse_meters=float(obj["rmse_m"]),
        )


def fit_calibration(
    pixels: list[PixelPoint],
    geos: list[GeoPoint],
    degree: int,
    frame_size: tuple[float, float],
) -> CalibrationModel:
    """Fit the pixel-to-geographic polynomial regression by least squares.

    Latitude and longitude are fitted as two independent regressions over
    the shared feature map of frame-normalized pixels. The solve uses an
    SVD-based least squares with a rank tolerance; a rank-deficient system
    (for example collinear correspondences) raises DegenerateGeometryError.
    """
    if len(pixels) != len(geos):
        raise ValueError(f"got {len(pixels)} pixels but {len(geos)} geo labels")
    n_features = feature_count(degree)
    if len(pixels) < n_features:
        raise InsufficientDataError(
            f"need at least {n_features} correspondences for degree {degree}, got {len(pixels)}"
        )

    normalizer = PixelNormalizer.for_frame(frame_size[0], frame_size[1])
    uv = np.array([normalizer.normalize(p) for p in pixels])
    design = _design_matrix(uv[:, 0], uv[:, 1], degree)
    labels = np.array([[g.lat, g.lon] for g in geos])

    coef, _, rank, _ = np.linalg.lstsq(design, labels, rcond=RANK_RCOND)
    if rank < n_features:
        raise DegenerateGeometryError(
            f"feature matrix rank {rank} < {n_features}; correspondences are degenerate"
        )

    predicted = design @ coef
    residuals = [
        haversine_distance(GeoPoint(lat, lon), g)
        for (lat, lon), g in zip(predicted, geos)
    ]
    rmse = math.sqrt(sum(r * r for r in residuals) / len(residuals))
    return CalibrationModel(
        degree=degree,
        weights=np.ascontiguousarray(coef.T),
        normalizer=normalizer,
        fit_rmse_meters=rmse,
    )


def pixel_to_geo(model: CalibrationModel, p: PixelPoint) -> GeoPoint:
    """Map a pixel point through the fitted model (no residual term)."""
    features = expand_features(model.normalizer.normalize(p), model.degree)
    lat = float(model.weights[0] @ features)
    lon = float(model.weights[1] @ features)
    return GeoPoint(lat, lon)


def haversine_distance(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in meters between two geographic points."""
    phi_a = math.radians(a.lat)
    phi_b = math.radians(b.lat)
    dphi = math.radians(b.lat - a.lat)
    dlam = math.radians(b.lon - a.lon)
    h = math.sin(dphi / 2.0) ** 2 + math.cos(phi_a) * math.cos(phi_b) * math.sin(dlam / 2.0) ** 2
    # Clamp against float rounding before the square root.
    h = min(1.0, max(0.0, h))
    return 2.0 * EARTH_RADIUS_M * math.asin(math.sqrt(h))


def save_model(model: CalibrationModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model.to_json_obj()) + "\n")


def load_model(path: str | Path) -> CalibrationModel:
    return CalibrationModel.from_json_obj(json.loads(Path(path).read_text()))


def load_correspondences(path: str | Path) -> tuple[list[PixelPoint], list[GeoPoint]]:
    """Read a correspondence file: a JSON array of {u, v, lat, lon} records."""
    records = json.loads(Path(path).read_text())
    pixels = [PixelPoint(float(r["u"]), float(r["v"])) for r in records]
    geos = [GeoPoint(float(r["lat"]), float(r["lon"])) for r in records]
    return pixels, geos


def save_correspondences(
    pairs: list[tuple[PixelPoint, GeoPoint]], path: str | Path
) -> None:
    records = [
        {"u": p.u, "v": p.v, "lat": g.lat, "lon": g.lon} for p, g in pairs
    ]
    Path(path).write_text(json.dumps(records) + "\n")

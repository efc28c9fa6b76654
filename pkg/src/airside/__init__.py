"""Airside surveillance analytics engine.

Turns per-frame aircraft bounding-box detections into calibrated geographic
tracks with region assignments, speed estimates, separation distances, and
radar-fused identities. A built-in scenario simulator provides ground truth
for end-to-end evaluation.
"""

__version__ = "0.1.0"

from .geo import (
    CalibrationModel,
    GeoPoint,
    PixelPoint,
    expand_features,
    fit_calibration,
    haversine_distance,
    pixel_to_geo,
)
from .regions import BoundingBox, Region, RegionGraph
from .tracking import Detection, Track, Tracker, TrackerConfig

__all__ = [
    "__version__",
    "BoundingBox",
    "CalibrationModel",
    "Detection",
    "GeoPoint",
    "PixelPoint",
    "Region",
    "RegionGraph",
    "Track",
    "Tracker",
    "TrackerConfig",
    "expand_features",
    "fit_calibration",
    "haversine_distance",
    "pixel_to_geo",
]

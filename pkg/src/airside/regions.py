"""Centerline regions (runways, taxiways, holding points) and their geometry.

Regions are two-point centerline segments drawn in image coordinates, plus
an adjacency graph of legal transitions that narrows the assignment search
space. The geometry primitives here (segment/box intersections, bearings,
centerline junctions) feed region assignment and separation analytics.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .geo import PixelPoint

REGION_KINDS = ("runway", "taxiway", "holding_point")

DEFAULT_COLORS = {
    "taxiway": "#00ff00",
    "runway": "#ff0000",
    "holding_point": "#0000ff",
}

# Endpoint-on-boundary ties count as a single intersection inside this tolerance.
BOUNDARY_TOL_PX = 1e-9


class UnknownRegionError(KeyError):
    """A region id was referenced that does not exist in the graph."""


@dataclass(frozen=True)
class Region:
    """A centerline segment with a type and display color."""

    id: str
    kind: str
    p1: PixelPoint
    p2: PixelPoint
    display_color: str = ""

    def __post_init__(self):
        if self.kind not in REGION_KINDS:
            raise ValueError(f"unknown region kind {self.kind!r}")
        if self.p1 == self.p2:
            raise ValueError(f"region {self.id!r} has coincident endpoints")
        if not self.display_color:
            object.__setattr__(self, "display_color", DEFAULT_COLORS[self.kind])


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned pixel box with x_min < x_max and y_min < y_max."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError(
                f"degenerate box ({self.x_min}, {self.y_min}, {self.x_max}, {self.y_max})"
            )

    @property
    def center(self) -> PixelPoint:
        return PixelPoint((self.x_min + self.x_max) / 2.0, (self.y_min + self.y_max) / 2.0)

    def as_list(self) -> list[float]:
        return [self.x_min, self.y_min, self.x_max, self.y_max]


@dataclass
class RegionGraph:
    """Immutable-after-load set of regions plus symmetric adjacency."""

    regions: dict[str, Region] = field(default_factory=dict)
    adjacency: dict[str, frozenset[str]] = field(default_factory=dict)

    def __post_init__(self):
        symmetric: dict[str, set[str]] = {rid: set() for rid in self.regions}
        for rid, neighbors in self.adjacency.items():
            if rid not in self.regions:
                raise UnknownRegionError(rid)
            for other in neighbors:
                if other not in self.regions:
                    raise UnknownRegionError(other)
                symmetric[rid].add(other)
                symmetric[other].add(rid)
        self.adjacency = {rid: frozenset(n) for rid, n in symmetric.items()}

    def neighbors(self, region_id: str) -> frozenset[str]:
        if region_id not in self.regions:
            raise UnknownRegionError(region_id)
        return self.adjacency.get(region_id, frozenset())

    def to_json_obj(self) -> dict:
        return {
            "regions": [
                {
                    "id": r.id,
                    "kind": r.kind,
                    "p1": [r.p1.u, r.p1.v],
                    "p2": [r.p2.u, r.p2.v],
                    "color": r.display_color,
                }
                for r in sorted(self.regions.values(), key=lambda r: r.id)
            ],
            "adjacency": {rid: sorted(self.adjacency[rid]) for rid in sorted(self.adjacency)},
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "RegionGraph":
        regions = {}
        for rec in obj["regions"]:
            region = Region(
                id=rec["id"],
                kind=rec["kind"],
                p1=PixelPoint(float(rec["p1"][0]), float(rec["p1"][1])),
                p2=PixelPoint(float(rec["p2"][0]), float(rec["p2"][1])),
                display_color=rec.get("color", ""),
            )
            regions[region.id] = region
        adjacency = {rid: frozenset(n) for rid, n in obj.get("adjacency", {}).items()}
        return cls(regions=regions, adjacency=adjacency)


def load_region_graph(path: str | Path) -> RegionGraph:
    return RegionGraph.from_json_obj(json.loads(Path(path).read_text()))


def save_region_graph(graph: RegionGraph, path: str | Path) -> None:
    Path(path).write_text(json.dumps(graph.to_json_obj()) + "\n")


def _on_box_boundary(x: float, y: float, box: BoundingBox, tol: float) -> bool:
    near_edge = min(
        abs(x - box.x_min), abs(x - box.x_max), abs(y - box.y_min), abs(y - box.y_max)
    )
    return near_edge <= tol


def segment_box_intersections(
    region: Region, box: BoundingBox, tol: float = BOUNDARY_TOL_PX
) -> list[PixelPoint]:
    """Intersections of the region centerline with the box boundary.

    Returns 0, 1, or 2 points ordered along the segment from p1. A segment
    entirely inside or entirely outside the box yields no points; one
    endpoint strictly inside yields the single boundary crossing.
    """
    x1, y1 = region.p1.u, region.p1.v
    dx = region.p2.u - x1
    dy = region.p2.v - y1

    # Liang-Barsky clipping to find the parameter interval inside the box.
    t0, t1 = 0.0, 1.0
    for p, q in (
        (-dx, x1 - box.x_min),
        (dx, box.x_max - x1),
        (-dy, y1 - box.y_min),
        (dy, box.y_max - y1),
    ):
        if p == 0.0:
            if q < 0.0:
                return []
        else:
            r = q / p
            if p < 0.0:
                t0 = max(t0, r)
            else:
                t1 = min(t1, r)
    if t0 > t1:
        return []

    points: list[tuple[float, float, float]] = []
    for t in (t0, t1):
        px, py = x1 + t * dx, y1 + t * dy
        if _on_box_boundary(px, py, box, tol):
            points.append((t, px, py))
    # A tangential touch produces the same point twice.
    if len(points) == 2 and math.hypot(points[1][1] - points[0][1], points[1][2] - points[0][2]) <= tol:
        points = points[:1]
    return [PixelPoint(px, py) for _, px, py in points]


def candidate_regions(graph: RegionGraph, current: str | None) -> set[str]:
    """Regions worth testing: everything, or the current region plus neighbors."""
    if current is None:
        return set(graph.regions)
    if current not in graph.regions:
        raise UnknownRegionError(current)
    return {current} | set(graph.neighbors(current))


def pixel_bearing(du: float, dv: float) -> float:
    """Bearing of a pixel-space displacement: 0 deg is up-image, clockwise."""
    bearing = math.degrees(math.atan2(du, -dv)) % 360.0
    # A tiny negative angle can round up to exactly 360.0 under modulo.
    return 0.0 if bearing == 360.0 else bearing


def region_bearings(region: Region) -> tuple[float, float]:
    """The centerline direction p1->p2 and its opposite, in degrees [0, 360)."""
    b = pixel_bearing(region.p2.u - region.p1.u, region.p2.v - region.p1.v)
    return b, (b + 180.0) % 360.0


def angular_difference(a: float, b: float) -> float:
    """Smallest absolute difference between two bearings, in [0, 180]."""
    return abs((a - b + 180.0) % 360.0 - 180.0)


# --- generic 2D segment helpers (shared with the simulator) -----------------


def line_intersection(
    a1: tuple[float, float], a2: tuple[float, float],
    b1: tuple[float, float], b2: tuple[float, float],
) -> tuple[float, float, float, float] | None:
    """Intersection of two infinite lines given by point pairs.

    Returns (x, y, ta, tb) with the intersection parameters along each
    segment, or None for (near-)parallel lines.
    """
    dax, day = a2[0] - a1[0], a2[1] - a1[1]
    dbx, dby = b2[0] - b1[0], b2[1] - b1[1]
    denom = dax * dby - day * dbx
    scale = math.hypot(dax, day) * math.hypot(dbx, dby)
    if abs(denom) <= 1e-12 * scale:
        return None
    rx, ry = b1[0] - a1[0], b1[1] - a1[1]
    ta = (rx * dby - ry * dbx) / denom
    tb = (rx * day - ry * dax) / denom
    return a1[0] + ta * dax, a1[1] + ta * day, ta, tb


def closest_points_between_segments(
    a1: tuple[float, float], a2: tuple[float, float],
    b1: tuple[float, float], b2: tuple[float, float],
) -> tuple[tuple[float, float], tuple[float, float]]:
    """Closest pair of points between two 2D segments."""
    dax, day = a2[0] - a1[0], a2[1] - a1[1]
    dbx, dby = b2[0] - b1[0], b2[1] - b1[1]
    rx, ry = a1[0] - b1[0], a1[1] - b1[1]
    a = dax * dax + day * day
    e = dbx * dbx + dby * dby
    f = dbx * rx + dby * ry
    c = dax * rx + day * ry
    b = dax * dbx + day * dby
    denom = a * e - b * b

    if denom > 1e-12 * max(a, e, 1e-30):
        s = min(1.0, max(0.0, (b * f - c * e) / denom))
    else:
        s = 0.0
    t = (b * s + f) / e if e > 0 else 0.0
    if t < 0.0:
        t = 0.0
        s = min(1.0, max(0.0, -c / a)) if a > 0 else 0.0
    elif t > 1.0:
        t = 1.0
        s = min(1.0, max(0.0, (b - c) / a)) if a > 0 else 0.0
    pa = (a1[0] + s * dax, a1[1] + s * day)
    pb = (b1[0] + t * dbx, b1[1] + t * dby)
    return pa, pb


def segment_junction(
    a1: tuple[float, float], a2: tuple[float, float],
    b1: tuple[float, float], b2: tuple[float, float],
) -> tuple[float, float]:
    """Junction of two segments: the line crossing if it lies on both,
    otherwise the midpoint of the closest pair of points."""
    hit = line_intersection(a1, a2, b1, b2)
    if hit is not None:
        x, y, ta, tb = hit
        eps = 1e-9
        if -eps <= ta <= 1.0 + eps and -eps <= tb <= 1.0 + eps:
            return x, y
    pa, pb = closest_points_between_segments(a1, a2, b1, b2)
    return (pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0


def next_region_entry_point(current: Region, nxt: Region) -> PixelPoint:
    """Entry point into an adjacent region: the centerline junction."""
    x, y = segment_junction(
        (current.p1.u, current.p1.v), (current.p2.u, current.p2.v),
        (nxt.p1.u, nxt.p1.v), (nxt.p2.u, nxt.p2.v),
    )
    return PixelPoint(x, y)


def point_segment_distance(
    p: tuple[float, float], a: tuple[float, float], b: tuple[float, float]
) -> float:
    """Distance from a point to a 2D segment."""
    dx, dy = b[0] - a[0], b[1] - a[1]
    length_sq = dx * dx + dy * dy
    if length_sq == 0.0:
        return math.hypot(p[0] - a[0], p[1] - a[1])
    t = min(1.0, max(0.0, ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / length_sq))
    return math.hypot(p[0] - (a[0] + t * dx), p[1] - (a[1] + t * dy))

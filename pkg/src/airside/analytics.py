"""Per-tick analytics over tracked aircraft: regions, motion, speeds, distances.

These functions are pure over tracker snapshots and the immutable region
graph and calibration model; the pipeline calls them once per tick. Speeds
are reported in knots and distances in feet, computed over geographic
positions obtained through the calibration model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .fusion import FusionResult
from .geo import (
    METERS_PER_SECOND_TO_KNOTS,
    METERS_TO_FEET,
    CalibrationModel,
    GeoPoint,
    PixelPoint,
    haversine_distance,
    pixel_to_geo,
)
from .regions import (
    BoundingBox,
    Region,
    RegionGraph,
    angular_difference,
    candidate_regions,
    next_region_entry_point,
    pixel_bearing,
    point_segment_distance,
    region_bearings,
    segment_box_intersections,
)
from .tracking import Track

UNASSIGNED_COLOR = "#808080"


class NotSameRegionError(ValueError):
    """Separation was requested for tracks assigned to different regions."""


@dataclass(frozen=True)
class AnalyticsConfig:
    v_still_kn: float = 2.0     # below this the aircraft counts as stationary
    speed_window: int = 3       # per-step speeds averaged into the report
    heading_window: int = 5     # smoothed-center span used for direction


@dataclass(frozen=True)
class SeparationReport:
    """Four head/tail distances between a same-region pair, in feet."""

    leader: int
    trailer: int
    region: str
    d_tail_tail_ft: float
    d_head_head_ft: float
    d_head_tail_ft: float
    d_tail_head_ft: float

    @property
    def d_min_ft(self) -> float:
        return min(
            self.d_tail_tail_ft, self.d_head_head_ft,
            self.d_head_tail_ft, self.d_tail_head_ft,
        )

    def to_json_obj(self) -> dict:
        return {
            "a": self.leader, "b": self.trailer, "region": self.region,
            "d_min_ft": self.d_min_ft,
            "d4_ft": [
                self.d_tail_tail_ft, self.d_head_head_ft,
                self.d_head_tail_ft, self.d_tail_head_ft,
            ],
        }


@dataclass
class TrackAnalytics:
    """Everything the display layer needs for one aircraft at one tick."""

    track_id: int
    geo: GeoPoint
    region: str | None
    moving: bool
    speed_kn: float | None
    heading_deg: float | None
    next_region_distances_ft: dict[str, float] = field(default_factory=dict)
    color: str = UNASSIGNED_COLOR
    text_style: str = "white"
    callsign: str | None = None
    actype: str | None = None

    def to_json_obj(self) -> dict:
        return {
            "id": self.track_id,
            "geo": [self.geo.lat, self.geo.lon],
            "region": self.region,
            "moving": self.moving,
            "speed_kn": self.speed_kn,
            "heading": self.heading_deg,
            "color": self.color,
            "text": self.text_style,
            "callsign": self.callsign,
            "actype": self.actype,
            "next": {rid: self.next_region_distances_ft[rid]
                     for rid in sorted(self.next_region_distances_ft)},
        }


@dataclass
class AnalyticsFrame:
    t: float
    tracks: list[TrackAnalytics] = field(default_factory=list)
    separations: list[SeparationReport] = field(default_factory=list)

    def to_json_obj(self) -> dict:
        return {
            "t": self.t,
            "tracks": [tr.to_json_obj() for tr in self.tracks],
            "separations": [sep.to_json_obj() for sep in self.separations],
        }


# --- motion -------------------------------------------------------------------


def estimate_speed(
    track: Track, model: CalibrationModel, window: int = 3
) -> float | None:
    """Mean of the last ``window`` per-step speeds over smoothed centers, knots."""
    samples = track.smoothed_centers
    if len(samples) < 2:
        return None
    window = max(1, window)
    recent = samples[-(window + 1):]
    steps = []
    for (t0, p0), (t1, p1) in zip(recent[:-1], recent[1:]):
        dt = t1 - t0
        if dt <= 0.0:
            continue
        meters = haversine_distance(pixel_to_geo(model, p0), pixel_to_geo(model, p1))
        steps.append(meters / dt * METERS_PER_SECOND_TO_KNOTS)
    if not steps:
        return None
    return sum(steps) / len(steps)


def classify_motion(
    track: Track, model: CalibrationModel, config: AnalyticsConfig | None = None
) -> bool:
    """True when the estimated speed exceeds the stationary threshold."""
    cfg = config or AnalyticsConfig()
    speed = estimate_speed(track, model, cfg.speed_window)
    return speed is not None and speed > cfg.v_still_kn


def track_heading(track: Track, window: int = 5) -> float | None:
    """Pixel-space bearing of the smoothed trajectory over the window."""
    samples = track.smoothed_centers
    if len(samples) < 2:
        return None
    anchor = samples[max(0, len(samples) - 1 - window)][1]
    latest = samples[-1][1]
    du, dv = latest.u - anchor.u, latest.v - anchor.v
    if math.hypot(du, dv) < 1e-9:
        return None
    return pixel_bearing(du, dv)


# --- region assignment -----------------------------------------------------------


def assign_region(
    box: BoundingBox,
    previous_region: str | None,
    graph: RegionGraph,
    moving: bool,
    heading_deg: float | None,
    restrict: bool = True,
) -> str | None:
    """Assign an aircraft box to a region.

    Candidates are the previous region plus its legal neighbors (or every
    region when unrestricted / no previous). Among candidates whose
    centerline intersects the box: none -> unassigned, one -> that region,
    several -> keep the previous region when stationary, otherwise take the
    region whose direction best matches the aircraft heading. Ties and the
    no-previous stationary case fall back deterministically.
    """
    if restrict:
        candidates = candidate_regions(graph, previous_region)
    else:
        candidates = set(graph.regions)

    intersected = sorted(
        rid for rid in candidates
        if segment_box_intersections(graph.regions[rid], box)
    )
    if not intersected:
        return None
    if len(intersected) == 1:
        return intersected[0]

    if not moving or heading_deg is None:
        if previous_region is not None and previous_region in intersected:
            return previous_region
        return _closest_centerline(box, intersected, graph)

    best_id = None
    best_diff = math.inf
    for rid in intersected:
        b1, b2 = region_bearings(graph.regions[rid])
        diff = min(angular_difference(heading_deg, b1), angular_difference(heading_deg, b2))
        if diff < best_diff:
            best_diff = diff
            best_id = rid
    return best_id


def _closest_centerline(box: BoundingBox, region_ids: list[str], graph: RegionGraph) -> str:
    center = box.center
    return min(
        region_ids,
        key=lambda rid: (
            point_segment_distance(
                (center.u, center.v),
                (graph.regions[rid].p1.u, graph.regions[rid].p1.v),
                (graph.regions[rid].p2.u, graph.regions[rid].p2.v),
            ),
            rid,
        ),
    )


# --- head/tail geometry along a region -----------------------------------------


def head_tail_points(
    box: BoundingBox, region: Region, heading_deg: float | None
) -> tuple[PixelPoint, PixelPoint] | None:
    """Head and tail of an aircraft: its centerline crossings, oriented.

    With a heading the head is the crossing furthest along it; otherwise the
    stored region direction orders the points. A single crossing serves as
    both head and tail; no crossing yields None.
    """
    points = segment_box_intersections(region, box)
    if not points:
        return None
    if len(points) == 1:
        return points[0], points[0]
    bearing = heading_deg if heading_deg is not None else region_bearings(region)[0]
    rad = math.radians(bearing)
    du, dv = math.sin(rad), -math.cos(rad)
    a, b = points
    if (a.u * du + a.v * dv) >= (b.u * du + b.v * dv):
        return a, b
    return b, a


def pair_separation(
    track_a: Track,
    track_b: Track,
    region: Region,
    model: CalibrationModel,
    heading_a: float | None = None,
    heading_b: float | None = None,
) -> SeparationReport:
    """Four great-circle distances between two aircraft on one region.

    The leader is the aircraft further along the working direction (a moving
    aircraft's heading when available, else the region direction); head/tail
    points come from the box/centerline crossings.
    """
    if track_a.region != region.id or track_b.region != region.id:
        raise NotSameRegionError(
            f"tracks {track_a.id} ({track_a.region}) and {track_b.id} "
            f"({track_b.region}) are not both on {region.id}"
        )
    reference = heading_a if heading_a is not None else heading_b
    if reference is None:
        reference = region_bearings(region)[0]

    ht_a = head_tail_points(track_a.last_box, region, heading_a if heading_a is not None else reference)
    ht_b = head_tail_points(track_b.last_box, region, heading_b if heading_b is not None else reference)
    if ht_a is None or ht_b is None:
        raise ValueError("both tracks must intersect the region centerline")

    rad = math.radians(reference)
    du, dv = math.sin(rad), -math.cos(rad)

    def along(p: PixelPoint) -> float:
        return p.u * du + p.v * dv

    center_a, center_b = track_a.last_box.center, track_b.last_box.center
    if along(center_a) >= along(center_b):
        leader, trailer = track_a, track_b
        (head_l, tail_l), (head_t, tail_t) = ht_a, ht_b
    else:
        leader, trailer = track_b, track_a
        (head_l, tail_l), (head_t, tail_t) = ht_b, ht_a

    def feet(p: PixelPoint, q: PixelPoint) -> float:
        return haversine_distance(pixel_to_geo(model, p), pixel_to_geo(model, q)) * METERS_TO_FEET

    return SeparationReport(
        leader=leader.id,
        trailer=trailer.id,
        region=region.id,
        d_tail_tail_ft=feet(tail_l, tail_t),
        d_head_head_ft=feet(head_l, head_t),
        d_head_tail_ft=feet(head_l, tail_t),
        d_tail_head_ft=feet(tail_l, head_t),
    )


def distance_to_next_regions(
    track: Track,
    graph: RegionGraph,
    model: CalibrationModel,
    heading_deg: float | None = None,
) -> dict[str, float]:
    """Distance in feet from the aircraft head to each adjacent region's entry."""
    if track.region is None:
        return {}
    region = graph.regions[track.region]
    crossings = segment_box_intersections(region, track.last_box)
    if not crossings:
        return {}

    p1 = (region.p1.u, region.p1.v)
    p2 = (region.p2.u, region.p2.v)
    seg_du, seg_dv = p2[0] - p1[0], p2[1] - p1[1]
    seg_len_sq = seg_du * seg_du + seg_dv * seg_dv

    def along_centerline(p: PixelPoint) -> float:
        return ((p.u - p1[0]) * seg_du + (p.v - p1[1]) * seg_dv) / seg_len_sq

    distances = {}
    for rid in sorted(graph.neighbors(track.region)):
        entry = next_region_entry_point(region, graph.regions[rid])
        entry_t = along_centerline(entry)
        head = min(crossings, key=lambda p: abs(along_centerline(p) - entry_t))
        meters = haversine_distance(pixel_to_geo(model, head), pixel_to_geo(model, entry))
        distances[rid] = meters * METERS_TO_FEET
    return distances


# --- frame assembly --------------------------------------------------------------


def build_frame_output(
    t: float,
    tracks: list[Track],
    graph: RegionGraph,
    model: CalibrationModel,
    fusion: FusionResult | None = None,
    config: AnalyticsConfig | None = None,
    motion: dict[int, tuple[bool, float | None]] | None = None,
    actypes: dict[str, str] | None = None,
) -> AnalyticsFrame:
    """Assemble the per-tick output record for the given (confirmed) tracks.

    ``motion`` carries precomputed (moving, heading) per track id so the
    assignment step and the output agree; anything missing is recomputed.
    Tracks are emitted in id order, separations per same-region pair.
    """
    cfg = config or AnalyticsConfig()
    fusion = fusion or FusionResult()
    frame = AnalyticsFrame(t=t)
    ordered = sorted(tracks, key=lambda tr: tr.id)

    infos: dict[int, TrackAnalytics] = {}
    for track in ordered:
        if motion is not None and track.id in motion:
            moving, heading = motion[track.id]
        else:
            moving = classify_motion(track, model, cfg)
            heading = track_heading(track, cfg.heading_window) if moving else None
        if not moving:
            heading = None
        speed = estimate_speed(track, model, cfg.speed_window)
        callsign = fusion.assignments.get(track.id)
        info = TrackAnalytics(
            track_id=track.id,
            geo=pixel_to_geo(model, track.last_smoothed),
            region=track.region,
            moving=moving,
            speed_kn=speed,
            heading_deg=heading,
            next_region_distances_ft=distance_to_next_regions(track, graph, model, heading),
            color=graph.regions[track.region].display_color if track.region else UNASSIGNED_COLOR,
            text_style="black" if moving else "white",
            callsign=callsign,
            actype=(actypes or {}).get(callsign) if callsign else None,
        )
        infos[track.id] = info
        frame.tracks.append(info)

    by_region: dict[str, list[Track]] = {}
    for track in ordered:
        if track.region is not None:
            by_region.setdefault(track.region, []).append(track)
    for rid in sorted(by_region):
        members = by_region[rid]
        region = graph.regions[rid]
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                a, b = members[i], members[j]
                ha = infos[a.id].heading_deg
                hb = infos[b.id].heading_deg
                if (
                    segment_box_intersections(region, a.last_box)
                    and segment_box_intersections(region, b.last_box)
                ):
                    frame.separations.append(
                        pair_separation(a, b, region, model, ha, hb)
                    )
    return frame

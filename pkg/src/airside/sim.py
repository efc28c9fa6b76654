"""Scenario simulator: the ground-truth oracle for the analytics engine.

Aircraft move along region centerlines in a local tangent plane, are
projected through a synthetic pinhole camera into noisy bounding-box
detections, and simultaneously emit an exact radar stream. Because the
camera model is known analytically, the simulator can also produce
calibration correspondences and grade the engine's position estimates.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .geo import EARTH_RADIUS_M, METERS_PER_SECOND_TO_KNOTS, GeoPoint, PixelPoint
from .geo import haversine_distance, save_correspondences
from .regions import RegionGraph, load_region_graph, Region, segment_junction
from .regions import save_region_graph

KNOTS_TO_MPS = 1.0 / METERS_PER_SECOND_TO_KNOTS


class BehindCameraError(ValueError):
    """The point does not project onto the image plane in front of the camera."""


class BrokenRouteError(ValueError):
    """Consecutive route regions are not adjacent in the region graph."""


class EmptyJoinError(ValueError):
    """No overlapping samples between estimates and ground truth."""


@dataclass(frozen=True)
class LocalTangentPlane:
    """Equirectangular approximation about an airport reference point."""

    ref_lat: float
    ref_lon: float

    @property
    def m_per_deg_lat(self) -> float:
        return EARTH_RADIUS_M * math.pi / 180.0

    @property
    def m_per_deg_lon(self) -> float:
        return self.m_per_deg_lat * math.cos(math.radians(self.ref_lat))

    def to_local(self, geo: GeoPoint) -> tuple[float, float]:
        return (
            (geo.lon - self.ref_lon) * self.m_per_deg_lon,
            (geo.lat - self.ref_lat) * self.m_per_deg_lat,
        )

    def to_geo(self, x_east: float, y_north: float) -> GeoPoint:
        return GeoPoint(
            self.ref_lat + y_north / self.m_per_deg_lat,
            self.ref_lon + x_east / self.m_per_deg_lon,
        )


@dataclass(frozen=True)
class Camera:
    """Pinhole camera on a tower: geo position plus pan/tilt orientation.

    Pan is a compass bearing (0 = north, clockwise); tilt is degrees below
    the horizontal. Roll is fixed at zero and the principal point sits at
    the frame center.
    """

    lat: float
    lon: float
    height_m: float
    pan_deg: float
    tilt_deg: float
    focal_px: float
    width: int
    height: int

    def axes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        pan = math.radians(self.pan_deg)
        tilt = math.radians(self.tilt_deg)
        forward = np.array(
            [math.sin(pan) * math.cos(tilt), math.cos(pan) * math.cos(tilt), -math.sin(tilt)]
        )
        right = np.array([math.cos(pan), -math.sin(pan), 0.0])
        down = np.cross(forward, right)
        return forward, right, down

    def to_json_obj(self) -> dict:
        return {
            "lat": self.lat, "lon": self.lon, "height_m": self.height_m,
            "pan_deg": self.pan_deg, "tilt_deg": self.tilt_deg,
            "focal_px": self.focal_px, "width": self.width, "height": self.height,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Camera":
        return cls(
            lat=float(obj["lat"]), lon=float(obj["lon"]), height_m=float(obj["height_m"]),
            pan_deg=float(obj["pan_deg"]), tilt_deg=float(obj["tilt_deg"]),
            focal_px=float(obj["focal_px"]), width=int(obj["width"]), height=int(obj["height"]),
        )


def project_local(
    camera: Camera, ltp: LocalTangentPlane, x: float, y: float, z: float = 0.0
) -> PixelPoint:
    """Project a local-plane point (east, north, up) to pixels."""
    cx, cy = ltp.to_local(GeoPoint(camera.lat, camera.lon))
    rel = np.array([x - cx, y - cy, z - camera.height_m])
    forward, right, down = camera.axes()
    depth = float(rel @ forward)
    if depth <= 1e-9:
        raise BehindCameraError(f"point ({x:.1f}, {y:.1f}, {z:.1f}) is behind the camera")
    u = camera.width / 2.0 + camera.focal_px * float(rel @ right) / depth
    v = camera.height / 2.0 + camera.focal_px * float(rel @ down) / depth
    return PixelPoint(u, v)


def project(
    camera: Camera, ltp: LocalTangentPlane, geo: GeoPoint, height_m: float = 0.0
) -> PixelPoint:
    """Project a geographic point at the given height above ground."""
    x, y = ltp.to_local(geo)
    return project_local(camera, ltp, x, y, height_m)


def unproject(
    camera: Camera, ltp: LocalTangentPlane, pixel: PixelPoint, ground_height_m: float = 0.0
) -> GeoPoint:
    """Exact inverse projection: intersect the pixel ray with the ground plane."""
    forward, right, down = camera.axes()
    ray = (
        forward
        + right * ((pixel.u - camera.width / 2.0) / camera.focal_px)
        + down * ((pixel.v - camera.height / 2.0) / camera.focal_px)
    )
    cz = camera.height_m
    if abs(ray[2]) < 1e-12:
        raise BehindCameraError(f"pixel ({pixel.u:.1f}, {pixel.v:.1f}) ray is horizontal")
    t = (ground_height_m - cz) / ray[2]
    if t <= 0.0:
        raise BehindCameraError(f"pixel ({pixel.u:.1f}, {pixel.v:.1f}) does not hit ground ahead")
    cx, cy = ltp.to_local(GeoPoint(camera.lat, camera.lon))
    return ltp.to_geo(cx + t * float(ray[0]), cy + t * float(ray[1]))


def in_frame(camera: Camera, p: PixelPoint) -> bool:
    return 0.0 <= p.u < camera.width and 0.0 <= p.v < camera.height


def ground_sample_distance(
    camera: Camera, ltp: LocalTangentPlane, pixel: PixelPoint, du: float = 1.0, dv: float = 0.0
) -> float:
    """Meters on the ground covered by a pixel step (du, dv) at this pixel."""
    a = unproject(camera, ltp, pixel)
    b = unproject(camera, ltp, PixelPoint(pixel.u + du, pixel.v + dv))
    return haversine_distance(a, b)


# --- scenario configuration --------------------------------------------------


@dataclass(frozen=True)
class AircraftSpec:
    """One scripted aircraft: route, cruise speed, holds, and dimensions.

    ``holds`` pauses the aircraft when it reaches the given arclength marks;
    ``lateral_offset_m`` shifts it off the centerline (to its left), which
    models ground vehicles driving beside a taxiway.
    """

    callsign: str
    actype: str
    route: tuple[str, ...]
    speed_kn: float
    start_time_s: float = 0.0
    start_offset_m: float = 0.0
    holds: tuple[tuple[float, float], ...] = ()
    length_m: float = 40.0
    wingspan_m: float = 36.0
    height_m: float = 12.0
    lateral_offset_m: float = 0.0
    reverse: bool = False

    def to_json_obj(self) -> dict:
        return {
            "callsign": self.callsign, "actype": self.actype, "route": list(self.route),
            "speed_kn": self.speed_kn, "start_time_s": self.start_time_s,
            "start_offset_m": self.start_offset_m,
            "holds": [list(h) for h in self.holds],
            "length_m": self.length_m, "wingspan_m": self.wingspan_m,
            "height_m": self.height_m, "lateral_offset_m": self.lateral_offset_m,
            "reverse": self.reverse,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "AircraftSpec":
        return cls(
            callsign=obj["callsign"], actype=obj.get("actype", ""),
            route=tuple(obj["route"]), speed_kn=float(obj["speed_kn"]),
            start_time_s=float(obj.get("start_time_s", 0.0)),
            start_offset_m=float(obj.get("start_offset_m", 0.0)),
            holds=tuple((float(s), float(d)) for s, d in obj.get("holds", [])),
            length_m=float(obj.get("length_m", 40.0)),
            wingspan_m=float(obj.get("wingspan_m", 36.0)),
            height_m=float(obj.get("height_m", 12.0)),
            lateral_offset_m=float(obj.get("lateral_offset_m", 0.0)),
            reverse=bool(obj.get("reverse", False)),
        )


@dataclass(frozen=True)
class NoiseSpec:
    bbox_jitter_px: float = 2.0
    dropout_p: float = 0.0
    radar_sigma_m: float = 8.0

    def to_json_obj(self) -> dict:
        return {
            "bbox_jitter_px": self.bbox_jitter_px,
            "dropout_p": self.dropout_p,
            "radar_sigma_m": self.radar_sigma_m,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "NoiseSpec":
        return cls(
            bbox_jitter_px=float(obj.get("bbox_jitter_px", 2.0)),
            dropout_p=float(obj.get("dropout_p", 0.0)),
            radar_sigma_m=float(obj.get("radar_sigma_m", 8.0)),
        )


@dataclass(frozen=True)
class GridSpec:
    """Correspondence sampling grid over the visible ground.

    ``aircraft_height_m`` mimics calibration data gathered from detected
    aircraft at known waypoints: each ground point is labeled with the pixel
    where a box center of an aircraft of that height would appear (its
    mid-height parallax), so the fitted model absorbs the height bias the
    way waypoint-trained calibration does. Zero keeps pure ground points.
    """

    nx: int = 40
    ny: int = 20
    margin_m: float = 100.0
    aircraft_height_m: float = 0.0

    def to_json_obj(self) -> dict:
        return {
            "nx": self.nx, "ny": self.ny, "margin_m": self.margin_m,
            "aircraft_height_m": self.aircraft_height_m,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "GridSpec":
        return cls(
            nx=int(obj.get("nx", 40)), ny=int(obj.get("ny", 20)),
            margin_m=float(obj.get("margin_m", 100.0)),
            aircraft_height_m=float(obj.get("aircraft_height_m", 0.0)),
        )


@dataclass(frozen=True)
class ScenarioConfig:
    region_file: str
    reference_lat: float
    reference_lon: float
    camera: Camera
    aircraft: tuple[AircraftSpec, ...]
    noise: NoiseSpec
    duration_s: int
    seed: int
    grid: GridSpec = GridSpec()

    def to_json_obj(self) -> dict:
        return {
            "region_file": self.region_file,
            "reference": {"lat": self.reference_lat, "lon": self.reference_lon},
            "camera": self.camera.to_json_obj(),
            "aircraft": [a.to_json_obj() for a in self.aircraft],
            "noise": self.noise.to_json_obj(),
            "duration_s": self.duration_s,
            "seed": self.seed,
            "correspondence_grid": self.grid.to_json_obj(),
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "ScenarioConfig":
        return cls(
            region_file=obj["region_file"],
            reference_lat=float(obj["reference"]["lat"]),
            reference_lon=float(obj["reference"]["lon"]),
            camera=Camera.from_json_obj(obj["camera"]),
            aircraft=tuple(AircraftSpec.from_json_obj(a) for a in obj["aircraft"]),
            noise=NoiseSpec.from_json_obj(obj.get("noise", {})),
            duration_s=int(obj["duration_s"]),
            seed=int(obj["seed"]),
            grid=GridSpec.from_json_obj(obj.get("correspondence_grid", {})),
        )


def load_scenario(path: str | Path) -> ScenarioConfig:
    obj = json.loads(Path(path).read_text())
    cfg = ScenarioConfig.from_json_obj(obj)
    region_path = Path(cfg.region_file)
    if not region_path.is_absolute():
        # Region file paths resolve relative to the scenario file.
        obj["region_file"] = str((Path(path).parent / region_path).resolve())
        cfg = ScenarioConfig.from_json_obj(obj)
    return cfg


def save_scenario(config: ScenarioConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(config.to_json_obj(), indent=2) + "\n")


# --- route geometry -----------------------------------------------------------


@dataclass
class RoutePath:
    """Polyline a scripted aircraft follows, with per-region arclength spans."""

    route: tuple[str, ...]
    waypoints: list[tuple[float, float]]
    cum: list[float]
    region_breaks: list[float]  # arclength where region i hands over to i+1

    @property
    def total_length(self) -> float:
        return self.cum[-1]

    def _leg_index(self, s: float) -> int:
        for i in range(len(self.cum) - 1):
            if s < self.cum[i + 1] and self.cum[i + 1] > self.cum[i]:
                return i
        for i in reversed(range(len(self.cum) - 1)):
            if self.cum[i + 1] > self.cum[i]:
                return i
        raise ValueError("route path has zero length")

    def point_at(self, s: float) -> tuple[float, float]:
        s = min(max(s, 0.0), self.total_length)
        i = self._leg_index(s)
        a, b = self.waypoints[i], self.waypoints[i + 1]
        span = self.cum[i + 1] - self.cum[i]
        f = (s - self.cum[i]) / span
        return a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])

    def direction_at(self, s: float) -> tuple[float, float]:
        s = min(max(s, 0.0), self.total_length)
        i = self._leg_index(s)
        a, b = self.waypoints[i], self.waypoints[i + 1]
        dx, dy = b[0] - a[0], b[1] - a[1]
        norm = math.hypot(dx, dy)
        return dx / norm, dy / norm

    def region_at(self, s: float) -> str:
        s = min(max(s, 0.0), self.total_length)
        for rid, boundary in zip(self.route, self.region_breaks):
            if s < boundary:
                return rid
        return self.route[-1]


def local_segments_for_graph(
    graph: RegionGraph, camera: Camera, ltp: LocalTangentPlane
) -> dict[str, tuple[tuple[float, float], tuple[float, float]]]:
    """Unproject every region centerline into local-plane coordinates."""
    segments = {}
    for rid, region in graph.regions.items():
        a = ltp.to_local(unproject(camera, ltp, region.p1))
        b = ltp.to_local(unproject(camera, ltp, region.p2))
        segments[rid] = (a, b)
    return segments


def build_route_path(
    route: Sequence[str],
    segments: dict[str, tuple[tuple[float, float], tuple[float, float]]],
    graph: RegionGraph,
    reverse: bool = False,
) -> RoutePath:
    """Chain route regions into a drivable polyline through their junctions."""
    if not route:
        raise BrokenRouteError("route is empty")
    for rid in route:
        if rid not in segments:
            raise BrokenRouteError(f"route region {rid!r} not in region file")
    for a, b in zip(route, route[1:]):
        if b not in graph.neighbors(a):
            raise BrokenRouteError(f"route regions {a!r} and {b!r} are not adjacent")

    if len(route) == 1:
        p1, p2 = segments[route[0]]
        waypoints = [p2, p1] if reverse else [p1, p2]
    else:
        junctions = [
            segment_junction(*segments[a], *segments[b]) for a, b in zip(route, route[1:])
        ]
        first = segments[route[0]]
        start = max(first, key=lambda p: math.hypot(p[0] - junctions[0][0], p[1] - junctions[0][1]))
        last = segments[route[-1]]
        end = max(last, key=lambda p: math.hypot(p[0] - junctions[-1][0], p[1] - junctions[-1][1]))
        waypoints = [start, *junctions, end]

    cum = [0.0]
    for a, b in zip(waypoints, waypoints[1:]):
        cum.append(cum[-1] + math.hypot(b[0] - a[0], b[1] - a[1]))
    if cum[-1] <= 0.0:
        raise BrokenRouteError("route path has zero length")

    # Region handover happens at the junction arclengths.
    breaks = cum[1:-1] if len(route) > 1 else []
    return RoutePath(route=tuple(route), waypoints=waypoints, cum=cum, region_breaks=breaks)


def position_and_speed(
    tau: float,
    start_offset_m: float,
    speed_mps: float,
    holds: Sequence[tuple[float, float]],
    total_length: float,
) -> tuple[float, float]:
    """Arclength and instantaneous speed after ``tau`` seconds of motion."""
    s = min(start_offset_m, total_length)
    if speed_mps <= 0.0:
        return s, 0.0
    remaining = tau
    for mark, duration in sorted(holds):
        if mark < s - 1e-9 or mark > total_length + 1e-9:
            continue
        travel = (mark - s) / speed_mps
        if remaining < travel:
            return s + remaining * speed_mps, speed_mps
        remaining -= travel
        s = mark
        if remaining < duration:
            return s, 0.0
        remaining -= duration
    travel = (total_length - s) / speed_mps
    if remaining < travel:
        return s + remaining * speed_mps, speed_mps
    return total_length, 0.0


def compass_bearing(dx_east: float, dy_north: float) -> float:
    return math.degrees(math.atan2(dx_east, dy_north)) % 360.0


def aircraft_corners(
    center: tuple[float, float],
    direction: tuple[float, float],
    length_m: float,
    wingspan_m: float,
    height_m: float,
) -> list[tuple[float, float, float]]:
    """Local-plane corners of the aircraft cuboid."""
    dx, dy = direction
    px, py = -dy, dx  # left of travel
    corners = []
    for a in (-0.5, 0.5):
        for b in (-0.5, 0.5):
            for z in (0.0, height_m):
                corners.append(
                    (
                        center[0] + a * length_m * dx + b * wingspan_m * px,
                        center[1] + a * length_m * dy + b * wingspan_m * py,
                        z,
                    )
                )
    return corners


def true_pixel_box(
    camera: Camera,
    ltp: LocalTangentPlane,
    center: tuple[float, float],
    direction: tuple[float, float],
    length_m: float,
    wingspan_m: float,
    height_m: float,
) -> tuple[float, float, float, float]:
    """Axis-aligned pixel footprint of the aircraft cuboid."""
    pts = [
        project_local(camera, ltp, x, y, z)
        for x, y, z in aircraft_corners(center, direction, length_m, wingspan_m, height_m)
    ]
    us = [p.u for p in pts]
    vs = [p.v for p in pts]
    return min(us), min(vs), max(us), max(vs)


# --- generation ---------------------------------------------------------------


@dataclass(frozen=True)
class GroundTruthRecord:
    t: float
    callsign: str
    geo: GeoPoint
    speed_kn: float
    heading_deg: float
    region: str | None
    box: tuple[float, float, float, float] | None

    def to_json_obj(self) -> dict:
        return {
            "t": self.t, "callsign": self.callsign,
            "lat": self.geo.lat, "lon": self.geo.lon,
            "speed_kn": self.speed_kn, "heading": self.heading_deg,
            "region": self.region,
            "box": list(self.box) if self.box is not None else None,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "GroundTruthRecord":
        box = obj.get("box")
        return cls(
            t=float(obj["t"]), callsign=obj["callsign"],
            geo=GeoPoint(float(obj["lat"]), float(obj["lon"])),
            speed_kn=float(obj["speed_kn"]), heading_deg=float(obj["heading"]),
            region=obj.get("region"),
            box=tuple(float(v) for v in box) if box is not None else None,
        )


@dataclass(frozen=True)
class GeneratedScenario:
    detections_path: Path
    radar_path: Path
    truth_path: Path
    correspondences_path: Path
    meta_path: Path


def sample_correspondences(
    config: ScenarioConfig,
    graph: RegionGraph,
    shift: tuple[float, float] = (0.0, 0.0),
) -> list[tuple[PixelPoint, GeoPoint]]:
    """Grid of exact pixel/geo pairs over the visible ground around the layout."""
    ltp = LocalTangentPlane(config.reference_lat, config.reference_lon)
    segments = local_segments_for_graph(graph, config.camera, ltp)
    xs = [p[0] for seg in segments.values() for p in seg]
    ys = [p[1] for seg in segments.values() for p in seg]
    m = config.grid.margin_m
    x_lo, x_hi = min(xs) - m, max(xs) + m
    y_lo, y_hi = min(ys) - m, max(ys) + m

    sample_z = config.grid.aircraft_height_m / 2.0
    pairs = []
    for iy in range(config.grid.ny):
        for ix in range(config.grid.nx):
            x = x_lo + (x_hi - x_lo) * (ix + 0.5) / config.grid.nx + shift[0]
            y = y_lo + (y_hi - y_lo) * (iy + 0.5) / config.grid.ny + shift[1]
            try:
                pixel = project_local(config.camera, ltp, x, y, sample_z)
            except BehindCameraError:
                continue
            if in_frame(config.camera, pixel):
                pairs.append((pixel, ltp.to_geo(x, y)))
    return pairs


def _clip_box(
    box: tuple[float, float, float, float], width: int, height: int
) -> tuple[float, float, float, float] | None:
    x_min = min(max(box[0], 0.0), width - 1e-6)
    y_min = min(max(box[1], 0.0), height - 1e-6)
    x_max = min(max(box[2], 0.0), width - 1e-6)
    y_max = min(max(box[3], 0.0), height - 1e-6)
    if x_min >= x_max or y_min >= y_max:
        return None
    return x_min, y_min, x_max, y_max


def aircraft_state(
    spec: AircraftSpec, path: RoutePath, t: float
) -> tuple[tuple[float, float], tuple[float, float], float, str | None] | None:
    """Local position, travel direction, speed (kn), and true region at time t."""
    if t < spec.start_time_s:
        return None
    s, speed_mps = position_and_speed(
        t - spec.start_time_s, spec.start_offset_m,
        spec.speed_kn * KNOTS_TO_MPS, spec.holds, path.total_length,
    )
    pos = path.point_at(s)
    direction = path.direction_at(s)
    if spec.lateral_offset_m != 0.0:
        pos = (
            pos[0] - direction[1] * spec.lateral_offset_m,
            pos[1] + direction[0] * spec.lateral_offset_m,
        )
        region = None
    else:
        region = path.region_at(s)
    return pos, direction, speed_mps * METERS_PER_SECOND_TO_KNOTS, region


def generate(config: ScenarioConfig, out_dir: str | Path) -> GeneratedScenario:
    """Write detection, radar, ground-truth, and correspondence files.

    Everything is driven by one seeded generator, so identical configs give
    byte-identical outputs.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    graph = load_region_graph(config.region_file)
    ltp = LocalTangentPlane(config.reference_lat, config.reference_lon)
    segments = local_segments_for_graph(graph, config.camera, ltp)
    paths = {
        spec.callsign: build_route_path(spec.route, segments, graph, spec.reverse)
        for spec in config.aircraft
    }

    rng = np.random.default_rng(config.seed)
    det_lines = []
    radar_lines = []
    truth_lines = []

    for tick in range(config.duration_s):
        t = float(tick)
        detections = []
        radar_entries = []
        for spec in config.aircraft:
            state = aircraft_state(spec, paths[spec.callsign], t)
            if state is None:
                continue
            pos, direction, speed_kn, region = state
            geo = ltp.to_geo(*pos)
            heading = compass_bearing(*direction)

            try:
                box = true_pixel_box(
                    config.camera, ltp, pos, direction,
                    spec.length_m, spec.wingspan_m, spec.height_m,
                )
            except BehindCameraError:
                box = None

            truth_lines.append(
                json.dumps(
                    GroundTruthRecord(
                        t=t, callsign=spec.callsign, geo=geo, speed_kn=speed_kn,
                        heading_deg=heading, region=region, box=box,
                    ).to_json_obj()
                )
            )

            east_noise = rng.normal(0.0, config.noise.radar_sigma_m)
            north_noise = rng.normal(0.0, config.noise.radar_sigma_m)
            radar_geo = ltp.to_geo(pos[0] + east_noise, pos[1] + north_noise)
            radar_entries.append(
                {
                    "callsign": spec.callsign, "type": spec.actype,
                    "lat": radar_geo.lat, "lon": radar_geo.lon, "speed_kn": speed_kn,
                }
            )

            if box is None:
                continue
            if config.noise.dropout_p > 0.0 and rng.random() < config.noise.dropout_p:
                continue
            jitter = rng.normal(0.0, config.noise.bbox_jitter_px, size=4)
            noisy = (
                box[0] + jitter[0], box[1] + jitter[1],
                box[2] + jitter[2], box[3] + jitter[3],
            )
            noisy = (
                min(noisy[0], noisy[2]), min(noisy[1], noisy[3]),
                max(noisy[0], noisy[2]), max(noisy[1], noisy[3]),
            )
            clipped = _clip_box(noisy, config.camera.width, config.camera.height)
            if clipped is None:
                continue
            conf = 0.9 + 0.1 * rng.random()
            detections.append({"box": list(clipped), "conf": conf})

        det_lines.append(json.dumps({"t": t, "detections": detections}))
        radar_lines.append(json.dumps({"t": t, "tracks": radar_entries}))

    correspondences = sample_correspondences(config, graph)

    detections_path = out / "detections.jsonl"
    radar_path = out / "radar.jsonl"
    truth_path = out / "truth.jsonl"
    correspondences_path = out / "correspondences.json"
    meta_path = out / "meta.json"

    detections_path.write_text("\n".join(det_lines) + "\n")
    radar_path.write_text("\n".join(radar_lines) + "\n")
    truth_path.write_text("\n".join(truth_lines) + "\n")
    save_correspondences(correspondences, correspondences_path)
    meta_path.write_text(
        json.dumps(
            {
                "config": config.to_json_obj(),
                "noise_model": {
                    "bbox": "independent N(0, bbox_jitter_px) on each box edge",
                    "dropout": "per aircraft per frame with probability dropout_p",
                    "radar": "independent N(0, radar_sigma_m) on local east/north",
                    "rng": "numpy default_rng(seed), draws in aircraft order per tick",
                },
            },
            indent=2,
        )
        + "\n"
    )
    return GeneratedScenario(
        detections_path=detections_path, radar_path=radar_path, truth_path=truth_path,
        correspondences_path=correspondences_path, meta_path=meta_path,
    )


def read_truth(path: str | Path) -> list[GroundTruthRecord]:
    records = []
    for line in Path(path).read_text().splitlines():
        if line.strip():
            records.append(GroundTruthRecord.from_json_obj(json.loads(line)))
    return records


# --- evaluation ---------------------------------------------------------------


def evaluate_positions(
    estimates: Iterable[tuple[float, str, GeoPoint]],
    truth: Iterable[GroundTruthRecord],
) -> dict:
    """Position-error statistics of identity-joined estimates vs ground truth."""
    truth_by_key = {(round(rec.t * 1e6), rec.callsign): rec.geo for rec in truth}
    errors = []
    for t, key, geo in estimates:
        ref = truth_by_key.get((round(t * 1e6), key))
        if ref is not None:
            errors.append(haversine_distance(geo, ref))
    if not errors:
        raise EmptyJoinError("no overlapping samples between estimates and truth")
    arr = np.asarray(errors)
    p5, p25, p50, p75, p95 = np.percentile(arr, [5, 25, 50, 75, 95])
    return {
        "mean_m": float(arr.mean()),
        "p5_m": float(p5), "p25_m": float(p25), "p50_m": float(p50),
        "p75_m": float(p75), "p95_m": float(p95),
        "count": int(arr.size),
    }


def estimates_from_analytics_lines(
    lines: Iterable[str],
) -> list[tuple[float, str, GeoPoint]]:
    """Pull fused (t, callsign, position) samples out of an analytics stream."""
    estimates = []
    for line in lines:
        if not line.strip():
            continue
        obj = json.loads(line)
        if "meta" in obj:
            continue
        t = float(obj["t"])
        for rec in obj.get("tracks", []):
            if rec.get("callsign"):
                lat, lon = rec["geo"]
                estimates.append((t, rec["callsign"], GeoPoint(float(lat), float(lon))))
    return estimates


# --- layout authoring helpers ---------------------------------------------------


def region_graph_from_local_layout(
    regions_local: list[tuple[str, str, tuple[float, float], tuple[float, float]]],
    adjacency: dict[str, list[str]],
    camera: Camera,
    ltp: LocalTangentPlane,
) -> RegionGraph:
    """Project a local-plane centerline layout into a pixel-space region graph."""
    regions = {}
    for rid, kind, a, b in regions_local:
        p1 = project_local(camera, ltp, a[0], a[1], 0.0)
        p2 = project_local(camera, ltp, b[0], b[1], 0.0)
        for p in (p1, p2):
            if not in_frame(camera, p):
                raise ValueError(f"region {rid!r} endpoint projects outside the frame: {p}")
        regions[rid] = Region(id=rid, kind=kind, p1=p1, p2=p2)
    return RegionGraph(
        regions=regions, adjacency={k: frozenset(v) for k, v in adjacency.items()}
    )

"""Camera-to-radar identity fusion by trajectory comparison.

Camera tracks and radar tracks are resampled to 1 Hz ticks; the cost of a
pairing is the mean great-circle distance over shared ticks in a trailing
window. Small instances are assigned by exact search (maximum matched pairs,
then minimum total cost), larger ones greedily by ascending cost.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .geo import GeoPoint, haversine_distance

EXHAUSTIVE_LIMIT = 6


class StreamFormatError(ValueError):
    """A radar stream line failed to parse; message carries the line number."""


@dataclass(frozen=True)
class FusionConfig:
    gate_m: float = 50.0
    window_s: float = 30.0
    min_shared_ticks: int = 3
    sticky_release_factor: float = 2.0
    sticky_release_ticks: int = 5


@dataclass
class RadarTrack:
    """Radar-side identity: callsign, aircraft type, timed geo samples."""

    callsign: str
    actype: str
    samples: list[tuple[float, GeoPoint, float | None]] = field(default_factory=list)

    def append(self, t: float, geo: GeoPoint, speed_kn: float | None) -> None:
        if self.samples and t <= self.samples[-1][0]:
            raise ValueError(
                f"radar track {self.callsign}: t={t} not after {self.samples[-1][0]}"
            )
        self.samples.append((t, geo, speed_kn))


@dataclass
class FusionResult:
    assignments: dict[int, str] = field(default_factory=dict)
    mean_residual_m: dict[int, float] = field(default_factory=dict)


def resample_to_ticks(samples: Iterable[tuple[float, GeoPoint]]) -> dict[int, GeoPoint]:
    """Nearest-tick resampling onto integer seconds."""
    best: dict[int, tuple[float, GeoPoint]] = {}
    for t, geo in samples:
        tick = round(t)
        offset = abs(t - tick)
        if tick not in best or offset < best[tick][0]:
            best[tick] = (offset, geo)
    return {tick: geo for tick, (_, geo) in best.items()}


def trajectory_cost(
    cam_ticks: dict[int, GeoPoint],
    radar_ticks: dict[int, GeoPoint],
    t_now: float,
    window_s: float,
) -> tuple[float, int]:
    """Mean haversine distance over shared ticks in the trailing window."""
    lo = t_now - window_s
    shared = [
        tick for tick in cam_ticks
        if lo <= tick <= t_now + 0.5 and tick in radar_ticks
    ]
    if not shared:
        return math.inf, 0
    total = sum(haversine_distance(cam_ticks[tick], radar_ticks[tick]) for tick in shared)
    return total / len(shared), len(shared)


def exhaustive_assignment(
    costs: dict[tuple[int, int], float], n_rows: int, n_cols: int
) -> list[tuple[int, int]]:
    """Exact one-to-one assignment over the admissible pairs.

    Maximizes the number of matched pairs, then minimizes total cost, via
    dynamic programming over column subsets. Deterministic for a fixed
    input ordering.
    """
    options: list[list[tuple[int, float]]] = [[] for _ in range(n_rows)]
    for (i, j), cost in costs.items():
        options[i].append((j, cost))
    for opts in options:
        opts.sort()

    memo: dict[tuple[int, int], tuple[int, float, tuple]] = {}

    def solve(i: int, used: int) -> tuple[int, float, tuple]:
        if i == n_rows:
            return 0, 0.0, ()
        key = (i, used)
        if key in memo:
            return memo[key]
        best = solve(i + 1, used)  # leave row i unmatched
        best = (best[0], best[1], best[2])
        for j, cost in options[i]:
            bit = 1 << j
            if used & bit:
                continue
            count, total, pairs = solve(i + 1, used | bit)
            cand = (count + 1, total + cost, ((i, j),) + pairs)
            if cand[0] > best[0] or (cand[0] == best[0] and cand[1] < best[1]):
                best = cand
        memo[key] = best
        return best

    _, _, pairs = solve(0, 0)
    return sorted(pairs)


def greedy_assignment(
    costs: dict[tuple[int, int], float], n_rows: int, n_cols: int
) -> list[tuple[int, int]]:
    """One-to-one matching taking admissible pairs in ascending cost order."""
    order = sorted((cost, i, j) for (i, j), cost in costs.items())
    used_rows: set[int] = set()
    used_cols: set[int] = set()
    pairs = []
    for cost, i, j in order:
        if i in used_rows or j in used_cols:
            continue
        pairs.append((i, j))
        used_rows.add(i)
        used_cols.add(j)
    return sorted(pairs)


def fuse(
    camera_trajectories: dict[int, list[tuple[float, GeoPoint]]],
    radar_tracks: list[RadarTrack],
    t_now: float,
    config: FusionConfig | None = None,
) -> FusionResult:
    """Assign radar identities to camera tracks for the current tick."""
    cfg = config or FusionConfig()
    cam_ids = sorted(camera_trajectories)
    radars = sorted(radar_tracks, key=lambda r: r.callsign)

    cam_ticks = {
        cid: resample_to_ticks(camera_trajectories[cid]) for cid in cam_ids
    }
    radar_ticks = [
        resample_to_ticks((t, geo) for t, geo, _ in r.samples) for r in radars
    ]

    costs: dict[tuple[int, int], float] = {}
    for i, cid in enumerate(cam_ids):
        for j in range(len(radars)):
            cost, shared = trajectory_cost(cam_ticks[cid], radar_ticks[j], t_now, cfg.window_s)
            if shared >= cfg.min_shared_ticks and cost <= cfg.gate_m:
                costs[(i, j)] = cost

    if len(cam_ids) <= EXHAUSTIVE_LIMIT and len(radars) <= EXHAUSTIVE_LIMIT:
        pairs = exhaustive_assignment(costs, len(cam_ids), len(radars))
    else:
        pairs = greedy_assignment(costs, len(cam_ids), len(radars))

    result = FusionResult()
    for i, j in pairs:
        result.assignments[cam_ids[i]] = radars[j].callsign
        result.mean_residual_m[cam_ids[i]] = costs[(i, j)]
    return result


class RadarFuser:
    """Stateful per-stream fuser with identity stickiness.

    A camera track keeps its assigned callsign until its residual against
    that radar track exceeds the release threshold for several consecutive
    ticks; only then is it freed for reassignment.
    """

    def __init__(self, config: FusionConfig | None = None):
        self.config = config or FusionConfig()
        self.radar: dict[str, RadarTrack] = {}
        self.sticky: dict[int, str] = {}
        self._bad_ticks: dict[int, int] = {}

    def ingest(
        self, t: float, entries: list[tuple[str, str, GeoPoint, float | None]]
    ) -> None:
        for callsign, actype, geo, speed in entries:
            track = self.radar.get(callsign)
            if track is None:
                track = RadarTrack(callsign=callsign, actype=actype)
                self.radar[callsign] = track
            track.append(t, geo, speed)

    def actype_of(self, callsign: str) -> str | None:
        track = self.radar.get(callsign)
        return track.actype if track else None

    def step(
        self, camera_trajectories: dict[int, list[tuple[float, GeoPoint]]], t_now: float
    ) -> FusionResult:
        cfg = self.config
        release_at = cfg.gate_m * cfg.sticky_release_factor

        # Drop stickiness for vanished camera tracks, re-score the rest.
        for cam_id in sorted(self.sticky):
            if cam_id not in camera_trajectories:
                del self.sticky[cam_id]
                self._bad_ticks.pop(cam_id, None)

        residuals: dict[int, float] = {}
        for cam_id in sorted(self.sticky):
            callsign = self.sticky[cam_id]
            radar = self.radar.get(callsign)
            if radar is None:
                cost = math.inf
            else:
                cam_ticks = resample_to_ticks(camera_trajectories[cam_id])
                radar_ticks = resample_to_ticks((t, g) for t, g, _ in radar.samples)
                cost, shared = trajectory_cost(cam_ticks, radar_ticks, t_now, cfg.window_s)
                if shared == 0:
                    cost = math.inf
            if cost > release_at:
                self._bad_ticks[cam_id] = self._bad_ticks.get(cam_id, 0) + 1
                if self._bad_ticks[cam_id] >= cfg.sticky_release_ticks:
                    del self.sticky[cam_id]
                    del self._bad_ticks[cam_id]
                    continue
            else:
                self._bad_ticks[cam_id] = 0
            residuals[cam_id] = cost

        free_cams = {
            cid: traj for cid, traj in camera_trajectories.items() if cid not in self.sticky
        }
        taken = set(self.sticky.values())
        free_radars = [r for cs, r in sorted(self.radar.items()) if cs not in taken]
        fresh = fuse(free_cams, free_radars, t_now, cfg)
        for cam_id, callsign in fresh.assignments.items():
            self.sticky[cam_id] = callsign
            self._bad_ticks[cam_id] = 0
            residuals[cam_id] = fresh.mean_residual_m[cam_id]

        result = FusionResult()
        for cam_id in sorted(self.sticky):
            result.assignments[cam_id] = self.sticky[cam_id]
            result.mean_residual_m[cam_id] = residuals.get(cam_id, math.inf)
        return result


def parse_radar_line(
    line: str, lineno: int
) -> tuple[float, list[tuple[str, str, GeoPoint, float | None]]]:
    try:
        obj = json.loads(line)
        t = float(obj["t"])
        entries = []
        for rec in obj["tracks"]:
            speed = rec.get("speed_kn")
            entries.append(
                (
                    str(rec["callsign"]),
                    str(rec.get("type", "")),
                    GeoPoint(float(rec["lat"]), float(rec["lon"])),
                    float(speed) if speed is not None else None,
                )
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise StreamFormatError(f"radar line {lineno}: {exc}") from exc
    return t, entries


def read_radar_stream(
    lines: Iterable[str],
) -> Iterator[tuple[float, list[tuple[str, str, GeoPoint, float | None]]]]:
    """Parse a radar JSONL stream, one tick per line."""
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        yield parse_radar_line(line, lineno)

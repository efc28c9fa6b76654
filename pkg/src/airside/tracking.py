"""Tracking by detection: greedy box association and track lifecycle.

Each camera stream has one Tracker. Every tick the tracker matches new
detections against live tracks by box overlap (with a center-distance
fallback gate), spawns tentative tracks for unmatched detections, and
retires tracks that miss too many consecutive frames.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .geo import PixelPoint
from .regions import BoundingBox

TENTATIVE = "tentative"
CONFIRMED = "confirmed"
DEAD = "dead"


class NonMonotoneTimeError(ValueError):
    """A detection batch arrived at or before the latest track time."""


class StreamFormatError(ValueError):
    """A stream line failed to parse; message carries the line number."""


@dataclass(frozen=True)
class Detection:
    """One detector output: frame time, pixel box, confidence."""

    t: float
    box: BoundingBox
    confidence: float

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence out of range: {self.confidence}")


@dataclass(frozen=True)
class TrackerConfig:
    iou_gate: float = 0.1
    center_gate_px: float = 100.0
    smoothing_window: int = 5
    m_confirm: int = 2
    m_drop: int = 3


@dataclass
class Track:
    """An identity-stable sequence of boxes with smoothed centers."""

    id: int
    history: list[tuple[float, BoundingBox]] = field(default_factory=list)
    smoothed_centers: list[tuple[float, PixelPoint]] = field(default_factory=list)
    region: str | None = None
    missed: int = 0
    state: str = TENTATIVE
    hits: int = 0  # consecutive matched frames, reset on a miss

    @property
    def last_time(self) -> float:
        return self.history[-1][0]

    @property
    def last_box(self) -> BoundingBox:
        return self.history[-1][1]

    @property
    def last_smoothed(self) -> PixelPoint:
        return self.smoothed_centers[-1][1]


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union of two boxes."""
    iw = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    ih = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    if iw <= 0.0 or ih <= 0.0:
        return 0.0
    inter = iw * ih
    area_a = (a.x_max - a.x_min) * (a.y_max - a.y_min)
    area_b = (b.x_max - b.x_min) * (b.y_max - b.y_min)
    return inter / (area_a + area_b - inter)


def center_distance(a: BoundingBox, b: BoundingBox) -> float:
    ca, cb = a.center, b.center
    return math.hypot(ca.u - cb.u, ca.v - cb.v)


def smooth_center(track: Track, window: int) -> PixelPoint:
    """Mean of the last min(window, available) box centers."""
    if not track.history:
        raise ValueError("track has no history")
    recent = track.history[-window:] if window > 0 else track.history[-1:]
    us = [box.center.u for _, box in recent]
    vs = [box.center.v for _, box in recent]
    return PixelPoint(sum(us) / len(us), sum(vs) / len(vs))


class Tracker:
    """Single-stream tracker; ``step`` is the only mutating entry point."""

    def __init__(self, config: TrackerConfig | None = None):
        self.config = config or TrackerConfig()
        self.tracks: dict[int, Track] = {}
        self._next_id = 1

    @property
    def live_tracks(self) -> list[Track]:
        return [t for t in self.tracks.values() if t.state != DEAD]

    @property
    def confirmed_tracks(self) -> list[Track]:
        return [t for t in self.tracks.values() if t.state == CONFIRMED]

    def associate(
        self, detections: list[Detection], t: float
    ) -> tuple[list[tuple[int, int]], list[int], list[int]]:
        """Greedily match live tracks to detections by descending IoU.

        A pair is admissible when IoU clears the gate or the box centers are
        within the pixel gate. Ties break by smaller center distance, then
        lower track id, then detection index. Returns (matches as
        (track_id, detection_index), unmatched detection indices, unmatched
        track ids).
        """
        live = sorted(self.live_tracks, key=lambda tr: tr.id)
        for track in live:
            if t <= track.last_time:
                raise NonMonotoneTimeError(
                    f"t={t} does not advance past track {track.id} at {track.last_time}"
                )
        for det in detections:
            if abs(det.t - t) > 1e-9:
                raise ValueError(f"detection at t={det.t} in batch for t={t}")

        candidates = []
        for track in live:
            for di, det in enumerate(detections):
                overlap = iou(track.last_box, det.box)
                dist = center_distance(track.last_box, det.box)
                if overlap >= self.config.iou_gate or dist <= self.config.center_gate_px:
                    candidates.append((-overlap, dist, track.id, di))
        candidates.sort()

        matches: list[tuple[int, int]] = []
        used_tracks: set[int] = set()
        used_dets: set[int] = set()
        for neg_overlap, dist, track_id, di in candidates:
            if track_id in used_tracks or di in used_dets:
                continue
            matches.append((track_id, di))
            used_tracks.add(track_id)
            used_dets.add(di)

        unmatched_dets = [i for i in range(len(detections)) if i not in used_dets]
        unmatched_tracks = [tr.id for tr in live if tr.id not in used_tracks]
        return matches, unmatched_dets, unmatched_tracks

    def step(self, detections: list[Detection], t: float) -> list[Track]:
        """Advance one tick; returns the live tracks after the update."""
        cfg = self.config
        matches, unmatched_dets, unmatched_tracks = self.associate(detections, t)

        for track_id, di in matches:
            track = self.tracks[track_id]
            track.history.append((t, detections[di].box))
            track.missed = 0
            track.hits += 1
            if track.state == TENTATIVE and track.hits >= cfg.m_confirm:
                track.state = CONFIRMED
            track.smoothed_centers.append((t, smooth_center(track, cfg.smoothing_window)))

        for di in unmatched_dets:
            box = detections[di].box
            track = Track(
                id=self._next_id,
                history=[(t, box)],
                smoothed_centers=[(t, box.center)],
                hits=1,
                state=CONFIRMED if cfg.m_confirm <= 1 else TENTATIVE,
            )
            self.tracks[track.id] = track
            self._next_id += 1

        for track_id in unmatched_tracks:
            track = self.tracks[track_id]
            track.missed += 1
            track.hits = 0
            if track.missed > cfg.m_drop:
                track.state = DEAD

        return self.live_tracks


def parse_detection_line(line: str, lineno: int) -> tuple[float, list[Detection]]:
    try:
        obj = json.loads(line)
        t = float(obj["t"])
        detections = [
            Detection(
                t=t,
                box=BoundingBox(*[float(v) for v in rec["box"]]),
                confidence=float(rec["conf"]),
            )
            for rec in obj["detections"]
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise StreamFormatError(f"detections line {lineno}: {exc}") from exc
    return t, detections


def read_detection_stream(lines: Iterable[str]) -> Iterator[tuple[float, list[Detection]]]:
    """Parse a detection JSONL stream, one frame per line."""
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        yield parse_detection_line(line, lineno)

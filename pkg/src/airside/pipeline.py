"""Streaming composition of tracker, analytics, and fusion over JSONL inputs.

One pipeline instance handles one camera stream. Processing is causal: the
frame emitted at time t uses detections up to t and radar up to t, nothing
later, so truncating the inputs truncates the output identically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from . import __version__
from .analytics import AnalyticsConfig, build_frame_output, classify_motion, track_heading
from .analytics import assign_region
from .fusion import FusionConfig, RadarFuser, read_radar_stream
from .geo import CalibrationModel, pixel_to_geo
from .regions import RegionGraph
from .tracking import CONFIRMED, Tracker, TrackerConfig, read_detection_stream


@dataclass(frozen=True)
class PipelineConfig:
    tracker: TrackerConfig = field(default_factory=TrackerConfig)
    analytics: AnalyticsConfig = field(default_factory=AnalyticsConfig)
    fusion: FusionConfig = field(default_factory=FusionConfig)
    tick_s: float = 1.0

    def __post_init__(self):
        if self.tick_s <= 0.0:
            raise ValueError("tick_s must be positive")
        positives = {
            "iou_gate": self.tracker.iou_gate,
            "center_gate_px": self.tracker.center_gate_px,
            "smoothing_window": self.tracker.smoothing_window,
            "m_confirm": self.tracker.m_confirm,
            "m_drop": self.tracker.m_drop,
            "v_still_kn": self.analytics.v_still_kn,
            "speed_window": self.analytics.speed_window,
            "heading_window": self.analytics.heading_window,
            "gate_m": self.fusion.gate_m,
            "window_s": self.fusion.window_s,
            "min_shared_ticks": self.fusion.min_shared_ticks,
        }
        for name, value in positives.items():
            if value <= 0:
                raise ValueError(f"{name} must be positive, got {value}")

    def to_json_obj(self) -> dict:
        return {
            "tracker": {
                "iou_gate": self.tracker.iou_gate,
                "center_gate_px": self.tracker.center_gate_px,
                "smoothing_window": self.tracker.smoothing_window,
                "m_confirm": self.tracker.m_confirm,
                "m_drop": self.tracker.m_drop,
            },
            "analytics": {
                "v_still_kn": self.analytics.v_still_kn,
                "speed_window": self.analytics.speed_window,
                "heading_window": self.analytics.heading_window,
            },
            "fusion": {
                "gate_m": self.fusion.gate_m,
                "window_s": self.fusion.window_s,
                "min_shared_ticks": self.fusion.min_shared_ticks,
                "sticky_release_factor": self.fusion.sticky_release_factor,
                "sticky_release_ticks": self.fusion.sticky_release_ticks,
            },
            "tick_s": self.tick_s,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "PipelineConfig":
        tr = obj.get("tracker", {})
        an = obj.get("analytics", {})
        fu = obj.get("fusion", {})
        return cls(
            tracker=TrackerConfig(
                iou_gate=float(tr.get("iou_gate", 0.1)),
                center_gate_px=float(tr.get("center_gate_px", 100.0)),
                smoothing_window=int(tr.get("smoothing_window", 5)),
                m_confirm=int(tr.get("m_confirm", 2)),
                m_drop=int(tr.get("m_drop", 3)),
            ),
            analytics=AnalyticsConfig(
                v_still_kn=float(an.get("v_still_kn", 2.0)),
                speed_window=int(an.get("speed_window", 3)),
                heading_window=int(an.get("heading_window", 5)),
            ),
            fusion=FusionConfig(
                gate_m=float(fu.get("gate_m", 50.0)),
                window_s=float(fu.get("window_s", 30.0)),
                min_shared_ticks=int(fu.get("min_shared_ticks", 3)),
                sticky_release_factor=float(fu.get("sticky_release_factor", 2.0)),
                sticky_release_ticks=int(fu.get("sticky_release_ticks", 5)),
            ),
            tick_s=float(obj.get("tick_s", 1.0)),
        )


def run_pipeline(
    detection_lines: Iterable[str],
    radar_lines: Iterable[str],
    graph: RegionGraph,
    model: CalibrationModel,
    config: PipelineConfig | None = None,
) -> Iterator[dict]:
    """Process detection frames into analytics frames, one dict per tick.

    The first yielded record is a metadata header with the effective config.
    """
    cfg = config or PipelineConfig()
    yield {"meta": {"version": __version__, "config": cfg.to_json_obj()}}

    tracker = Tracker(cfg.tracker)
    fuser = RadarFuser(cfg.fusion)
    trajectories: dict[int, list] = {}

    radar_iter = read_radar_stream(radar_lines)
    pending_radar = next(radar_iter, None)

    for t, detections in read_detection_stream(detection_lines):
        # Ingest all radar reports up to and including the current tick.
        while pending_radar is not None and pending_radar[0] <= t + 1e-9:
            fuser.ingest(pending_radar[0], pending_radar[1])
            pending_radar = next(radar_iter, None)

        live = tracker.step(detections, t)
        live_ids = {tr.id for tr in live}

        motion: dict[int, tuple[bool, float | None]] = {}
        for track in sorted(live, key=lambda tr: tr.id):
            moving = classify_motion(track, model, cfg.analytics)
            heading = track_heading(track, cfg.analytics.heading_window) if moving else None
            track.region = assign_region(
                track.last_box, track.region, graph, moving, heading
            )
            motion[track.id] = (moving, heading)
            if track.state == CONFIRMED and track.smoothed_centers[-1][0] == t:
                trajectories.setdefault(track.id, []).append(
                    (t, pixel_to_geo(model, track.last_smoothed))
                )

        for tid in list(trajectories):
            if tid not in live_ids:
                del trajectories[tid]
            else:
                cutoff = t - cfg.fusion.window_s - 1.0
                trajectories[tid] = [s for s in trajectories[tid] if s[0] >= cutoff]

        confirmed = {tid: traj for tid, traj in trajectories.items()}
        fusion = fuser.step(confirmed, t)
        actypes = {
            callsign: fuser.actype_of(callsign) or ""
            for callsign in fusion.assignments.values()
        }

        frame = build_frame_output(
            t,
            tracker.confirmed_tracks,
            graph,
            model,
            fusion,
            cfg.analytics,
            motion,
            actypes,
        )
        yield frame.to_json_obj()

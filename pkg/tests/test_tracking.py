"""Tests for box association, track lifecycle, and center smoothing."""

import itertools

import numpy as np
import pytest

from airside.geo import PixelPoint
from airside.regions import BoundingBox
from airside.tracking import (
    CONFIRMED,
    DEAD,
    TENTATIVE,
    Detection,
    NonMonotoneTimeError,
    StreamFormatError,
    Track,
    Tracker,
    TrackerConfig,
    center_distance,
    iou,
    read_detection_stream,
    smooth_center,
)


def box_at(cx, cy, w=40.0, h=20.0):
    return BoundingBox(cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2)


def det(t, cx, cy, conf=0.95, w=40.0, h=20.0):
    return Detection(t=t, box=box_at(cx, cy, w, h), confidence=conf)


class TestAssociate:
    def test_no_tracks_all_unmatched(self):
        tracker = Tracker()
        matches, unmatched_dets, unmatched_tracks = tracker.associate(
            [det(0.0, 100, 100), det(0.0, 300, 100), det(0.0, 500, 100)], 0.0
        )
        assert matches == []
        assert unmatched_dets == [0, 1, 2]
        assert unmatched_tracks == []

    def test_high_iou_match(self):
        tracker = Tracker()
        tracker.step([det(0.0, 100, 100)], 0.0)
        matches, ud, ut = tracker.associate([det(1.0, 102, 100)], 1.0)
        assert matches == [(1, 0)]
        assert ud == [] and ut == []

    def test_non_monotone_time(self):
        tracker = Tracker()
        tracker.step([det(0.0, 100, 100)], 0.0)
        with pytest.raises(NonMonotoneTimeError):
            tracker.associate([det(0.0, 100, 100)], 0.0)

    def test_greedy_equals_exhaustive_on_separated_targets(self):
        # Oracle: enumerate all 4! assignments, maximize total IoU.
        rng = np.random.default_rng(3)
        for _ in range(50):
            centers = []
            while len(centers) < 4:
                c = (rng.uniform(50, 950), rng.uniform(50, 950))
                if all(abs(c[0] - o[0]) + abs(c[1] - o[1]) > 150 for o in centers):
                    centers.append(c)
            tracker = Tracker()
            tracker.step([det(0.0, cx, cy) for cx, cy in centers], 0.0)
            moved = [
                (cx + rng.uniform(-8, 8), cy + rng.uniform(-8, 8)) for cx, cy in centers
            ]
            detections = [det(1.0, cx, cy) for cx, cy in moved]
            matches, _, _ = tracker.associate(detections, 1.0)

            tracks = sorted(tracker.live_tracks, key=lambda tr: tr.id)
            best_total, best_perm = -1.0, None
            for perm in itertools.permutations(range(4)):
                total = sum(
                    iou(tracks[i].last_box, detections[perm[i]].box) for i in range(4)
                )
                if total > best_total:
                    best_total = total
                    best_perm = perm
            expected = {(tracks[i].id, best_perm[i]) for i in range(4)}
            assert set(matches) == expected

    def test_one_to_one(self):
        tracker = Tracker()
        tracker.step([det(0.0, 100, 100), det(0.0, 130, 100)], 0.0)
        detections = [det(1.0, 102, 100), det(1.0, 131, 100), det(1.0, 115, 100)]
        matches, unmatched_dets, unmatched_tracks = tracker.associate(detections, 1.0)
        matched_tracks = [m[0] for m in matches]
        matched_dets = [m[1] for m in matches]
        assert len(matched_tracks) == len(set(matched_tracks))
        assert len(matched_dets) == len(set(matched_dets))
        assert set(matched_dets) | set(unmatched_dets) == {0, 1, 2}


class TestStep:
    def test_steady_stream_single_confirmed_track(self):
        tracker = Tracker()
        for t in range(60):
            tracker.step([det(float(t), 100 + t, 100)], float(t))
        tracks = tracker.live_tracks
        assert len(tracks) == 1
        assert tracks[0].state == CONFIRMED
        assert len(tracks[0].history) == 60

    def test_drop_after_missed_frames(self):
        cfg = TrackerConfig()
        tracker = Tracker(cfg)
        tracker.step([det(0.0, 100, 100)], 0.0)
        for t in range(1, cfg.m_drop + 2):
            tracker.step([], float(t))
        track = tracker.tracks[1]
        assert track.state == DEAD
        assert tracker.live_tracks == []

    def test_confirmation_threshold(self):
        tracker = Tracker(TrackerConfig(m_confirm=2))
        tracker.step([det(0.0, 100, 100)], 0.0)
        assert tracker.tracks[1].state == TENTATIVE
        tracker.step([det(1.0, 101, 100)], 1.0)
        assert tracker.tracks[1].state == CONFIRMED

    def test_deterministic_ids_in_spawn_order(self):
        tracker = Tracker()
        tracker.step([det(0.0, 100, 100), det(0.0, 300, 100)], 0.0)
        assert sorted(tracker.tracks) == [1, 2]

    def test_rerun_identical(self):
        def run():
            tracker = Tracker()
            rng = np.random.default_rng(5)
            for t in range(30):
                dets = [
                    det(float(t), 100 + 3 * t + rng.normal(0, 1), 100 + rng.normal(0, 1)),
                    det(float(t), 500 - 2 * t + rng.normal(0, 1), 300 + rng.normal(0, 1)),
                ]
                tracker.step(dets, float(t))
            return [(tr.id, tr.state, len(tr.history)) for tr in tracker.live_tracks]

        assert run() == run()


class TestSmoothCenter:
    def test_constant_center(self):
        track = Track(id=1, history=[(float(t), box_at(250, 90)) for t in range(10)])
        c = smooth_center(track, 5)
        assert (c.u, c.v) == (pytest.approx(250.0), pytest.approx(90.0))

    def test_single_entry_truncated_window(self):
        track = Track(id=1, history=[(0.0, box_at(123, 45))])
        c = smooth_center(track, 5)
        assert (c.u, c.v) == (pytest.approx(123.0), pytest.approx(45.0))

    def test_linear_motion_lag(self):
        # Closed form: the mean of an arithmetic sequence lags the head by
        # step * (n - 1) / 2.
        step, n = 7.0, 5
        track = Track(
            id=1, history=[(float(t), box_at(100 + step * t, 200)) for t in range(20)]
        )
        c = smooth_center(track, n)
        true_u = 100 + step * 19
        assert true_u - c.u == pytest.approx(step * (n - 1) / 2)

    def test_inside_hull_of_window(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            n = int(rng.integers(1, 8))
            track = Track(
                id=1,
                history=[
                    (float(t), box_at(rng.uniform(50, 900), rng.uniform(50, 500)))
                    for t in range(int(rng.integers(1, 12)))
                ],
            )
            c = smooth_center(track, n)
            window = track.history[-n:]
            us = [b.center.u for _, b in window]
            vs = [b.center.v for _, b in window]
            assert min(us) - 1e-9 <= c.u <= max(us) + 1e-9
            assert min(vs) - 1e-9 <= c.v <= max(vs) + 1e-9


class TestHelpers:
    def test_iou_disjoint_zero(self):
        assert iou(box_at(0, 0), box_at(1000, 1000)) == 0.0

    def test_iou_identical_one(self):
        assert iou(box_at(50, 50), box_at(50, 50)) == pytest.approx(1.0)

    def test_center_distance(self):
        assert center_distance(box_at(0, 0), box_at(30, 40)) == pytest.approx(50.0)

    def test_confidence_validation(self):
        with pytest.raises(ValueError):
            det(0.0, 10, 10, conf=1.5)


class TestDetectionStream:
    def test_parse_roundtrip(self):
        lines = [
            '{"t": 0.0, "detections": [{"box": [0, 0, 10, 10], "conf": 0.9}]}',
            '{"t": 1.0, "detections": []}',
        ]
        frames = list(read_detection_stream(lines))
        assert len(frames) == 2
        assert frames[0][0] == 0.0
        assert len(frames[0][1]) == 1
        assert frames[1][1] == []

    def test_parse_error_carries_line_number(self):
        lines = ['{"t": 0.0, "detections": []}', '{"t": 1.0, "detections": [{"box": [5]}]}']
        with pytest.raises(StreamFormatError, match="line 2"):
            list(read_detection_stream(lines))

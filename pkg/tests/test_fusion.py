"""Tests for camera/radar trajectory matching and identity stickiness."""

import itertools
import math

import numpy as np
import pytest

from airside.fusion import (
    FusionConfig,
    RadarFuser,
    RadarTrack,
    StreamFormatError,
    exhaustive_assignment,
    fuse,
    greedy_assignment,
    read_radar_stream,
    resample_to_ticks,
    trajectory_cost,
)
from airside.geo import GeoPoint

LAT0, LON0 = 1.35, 103.99
M_PER_DEG = 111_194.926644  # local meters per degree of latitude


def geo_at(east_m, north_m):
    return GeoPoint(
        LAT0 + north_m / M_PER_DEG,
        LON0 + east_m / (M_PER_DEG * math.cos(math.radians(LAT0))),
    )


def brute_force_assignment(costs, n_rows, n_cols):
    """Enumerate every one-to-one pairing; maximize count, then minimize cost."""
    best = (0, 0.0, [])
    rows = list(range(n_rows))
    cols = list(range(n_cols))
    for k in range(min(n_rows, n_cols), -1, -1):
        for row_subset in itertools.combinations(rows, k):
            for col_perm in itertools.permutations(cols, k):
                pairs = list(zip(row_subset, col_perm))
                if any(p not in costs for p in pairs):
                    continue
                total = sum(costs[p] for p in pairs)
                if k > best[0] or (k == best[0] and total < best[1]):
                    best = (k, total, sorted(pairs))
        if best[0] == k and best[2]:
            break
    return best[2]


def make_radar(callsign, offsets, speed=10.0, actype="A333"):
    track = RadarTrack(callsign=callsign, actype=actype)
    for t, (e, n) in offsets:
        track.append(t, geo_at(e, n), speed)
    return track


class TestAssignmentAlgorithms:
    def test_exhaustive_matches_brute_force_random(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            n, m = int(rng.integers(1, 5)), int(rng.integers(1, 5))
            costs = {}
            for i in range(n):
                for j in range(m):
                    if rng.random() < 0.7:
                        costs[(i, j)] = float(rng.uniform(1, 100))
            got = exhaustive_assignment(costs, n, m)
            expected = brute_force_assignment(costs, n, m)
            assert len(got) == len(expected)
            assert sum(costs[p] for p in got) == pytest.approx(
                sum(costs[p] for p in expected)
            )

    def test_greedy_equals_exhaustive_on_separated_instances(self):
        # Scenario-class instances: each camera track sits near exactly one
        # radar track (noise within the gate, other targets far beyond it).
        rng = np.random.default_rng(4)
        for _ in range(200):
            k = int(rng.integers(1, 5))
            costs = {}
            perm = rng.permutation(k)
            for i in range(k):
                for j in range(k):
                    if perm[i] == j:
                        costs[(i, j)] = float(rng.uniform(1, 25))
            greedy = greedy_assignment(costs, k, k)
            exact = exhaustive_assignment(costs, k, k)
            brute = brute_force_assignment(costs, k, k)
            assert greedy == exact == brute

    def test_deterministic(self):
        costs = {(0, 0): 5.0, (0, 1): 7.0, (1, 0): 6.0, (1, 1): 3.0}
        assert exhaustive_assignment(costs, 2, 2) == exhaustive_assignment(costs, 2, 2)
        assert greedy_assignment(costs, 2, 2) == greedy_assignment(costs, 2, 2)


class TestFuse:
    def test_single_overlapping_pair(self):
        cam = {1: [(float(t), geo_at(5.0 * t, 3.0)) for t in range(10)]}
        radar = [make_radar("SIA123", [(float(t), (5.0 * t, -3.0)) for t in range(10)])]
        result = fuse(cam, radar, 9.0, FusionConfig())
        assert result.assignments == {1: "SIA123"}
        assert result.mean_residual_m[1] < 10.0

    def test_two_aircraft_km_apart(self):
        cam = {
            1: [(float(t), geo_at(4.0 * t, 0.0)) for t in range(10)],
            2: [(float(t), geo_at(1000.0 + 4.0 * t, 0.0)) for t in range(10)],
        }
        radar = [
            make_radar("B", [(float(t), (1000.0 + 4.0 * t, 6.0)) for t in range(10)]),
            make_radar("A", [(float(t), (4.0 * t, -6.0)) for t in range(10)]),
        ]
        result = fuse(cam, radar, 9.0, FusionConfig())
        assert result.assignments == {1: "A", 2: "B"}

    def test_no_time_overlap_unmatched(self):
        cam = {1: [(float(t), geo_at(0, 0)) for t in range(5)]}
        radar = [make_radar("X", [(float(t), (0, 0)) for t in range(100, 110)])]
        result = fuse(cam, radar, 4.0, FusionConfig())
        assert result.assignments == {}

    def test_too_few_shared_ticks_inadmissible(self):
        cam = {1: [(0.0, geo_at(0, 0)), (1.0, geo_at(1, 0))]}
        radar = [make_radar("X", [(0.0, (0, 0)), (1.0, (1, 0))])]
        result = fuse(cam, radar, 1.0, FusionConfig(min_shared_ticks=3))
        assert result.assignments == {}

    def test_beyond_gate_inadmissible(self):
        cam = {1: [(float(t), geo_at(0, 0)) for t in range(10)]}
        radar = [make_radar("X", [(float(t), (200.0, 0)) for t in range(10)])]
        result = fuse(cam, radar, 9.0, FusionConfig(gate_m=50.0))
        assert result.assignments == {}

    def test_injective(self):
        cam = {
            1: [(float(t), geo_at(0, 0)) for t in range(10)],
            2: [(float(t), geo_at(10, 0)) for t in range(10)],
        }
        radar = [make_radar("X", [(float(t), (3, 0)) for t in range(10)])]
        result = fuse(cam, radar, 9.0, FusionConfig())
        assert len(set(result.assignments.values())) == len(result.assignments)
        assert len(result.assignments) == 1


class TestResampling:
    def test_nearest_tick_wins(self):
        samples = [(0.9, geo_at(1, 0)), (1.1, geo_at(2, 0)), (1.4, geo_at(3, 0))]
        ticks = resample_to_ticks(samples)
        assert ticks[1] == geo_at(1, 0)  # 0.9 is closer to tick 1 than 1.1

    def test_window_restriction(self):
        cam = {t: geo_at(0, 0) for t in range(100)}
        radar = {t: geo_at(0, 0) for t in range(100)}
        cost, shared = trajectory_cost(cam, radar, 99.0, 30.0)
        assert shared == 31
        assert cost == pytest.approx(0.0, abs=1e-9)


class TestRadarFuser:
    def test_sticky_assignment_survives_transient_outlier(self):
        cfg = FusionConfig(sticky_release_ticks=5)
        fuser = RadarFuser(cfg)
        cam_true = [(float(t), geo_at(2.0 * t, 0.0)) for t in range(40)]
        for t in range(40):
            fuser.ingest(float(t), [("SIA1", "A388", geo_at(2.0 * t, 4.0), 5.0)])
        trajectory = {}
        for t in range(10):
            trajectory[1] = cam_true[: t + 1]
            result = fuser.step(trajectory, float(t))
        assert result.assignments == {1: "SIA1"}
        # Three ticks of bad residual must not release the identity.
        for t in range(10, 13):
            trajectory[1] = trajectory[1] + [(float(t), geo_at(2.0 * t + 500.0, 0.0))]
            result = fuser.step(trajectory, float(t))
            assert result.assignments.get(1) == "SIA1"

    def test_release_after_sustained_divergence(self):
        cfg = FusionConfig(sticky_release_ticks=5, window_s=5.0)
        fuser = RadarFuser(cfg)
        for t in range(60):
            fuser.ingest(float(t), [("SIA1", "A388", geo_at(0.0, 0.0), 0.0)])
        trajectory = []
        for t in range(10):
            trajectory.append((float(t), geo_at(0.0, 0.0)))
            result = fuser.step({1: list(trajectory)}, float(t))
        assert result.assignments == {1: "SIA1"}
        for t in range(10, 30):
            trajectory.append((float(t), geo_at(5000.0, 0.0)))
            result = fuser.step({1: list(trajectory)}, float(t))
        assert result.assignments == {}

    def test_actype_lookup(self):
        fuser = RadarFuser()
        fuser.ingest(0.0, [("SIA1", "A388", geo_at(0, 0), 1.0)])
        assert fuser.actype_of("SIA1") == "A388"
        assert fuser.actype_of("nope") is None


class TestRadarStream:
    def test_parse(self):
        lines = [
            '{"t": 0.0, "tracks": [{"callsign": "SIA1", "type": "A333", '
            '"lat": 1.35, "lon": 103.99, "speed_kn": 12.0}]}',
        ]
        frames = list(read_radar_stream(lines))
        assert frames[0][0] == 0.0
        callsign, actype, geo, speed = frames[0][1][0]
        assert (callsign, actype, speed) == ("SIA1", "A333", 12.0)

    def test_parse_error_line_number(self):
        lines = ['{"t": 0.0, "tracks": []}', '{"t": 1.0, "tracks": [{"lat": 1}]}']
        with pytest.raises(StreamFormatError, match="line 2"):
            list(read_radar_stream(lines))

    def test_radar_track_monotone_time(self):
        track = RadarTrack(callsign="X", actype="")
        track.append(0.0, geo_at(0, 0), None)
        with pytest.raises(ValueError):
            track.append(0.0, geo_at(0, 0), None)

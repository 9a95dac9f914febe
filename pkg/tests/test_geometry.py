import math
import random

import pytest

from rampmerge.errors import DegeneratePath, MergePointOffPath, OffPath, OutOfRange
from rampmerge.geometry import (
    ON_RAMP,
    HIGHWAY,
    build_path,
    default_paths,
    match_station,
    paths_from_document,
    paths_to_document,
    point_at_station,
)

from oracles import dense_station


@pytest.fixture
def straight():
    return build_path([(0.0, 0.0), (100.0, 0.0)], (100.0, 0.0), HIGHWAY)


@pytest.fixture
def bent():
    return build_path([(0.0, 0.0), (3.0, 4.0), (3.0, 10.0)], (3.0, 10.0), ON_RAMP)


def test_straight_path_lengths(straight):
    assert straight.total_length == pytest.approx(100.0)
    assert straight.merge_station == pytest.approx(100.0)


def test_bent_path_cum_lengths(bent):
    assert bent.cum_length == pytest.approx((0.0, 5.0, 11.0))
    assert bent.merge_station == pytest.approx(11.0)


def test_degenerate_path_rejected():
    with pytest.raises(DegeneratePath):
        build_path([(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)], (1.0, 0.0), HIGHWAY)


def test_merge_point_off_path_rejected():
    with pytest.raises(MergePointOffPath):
        build_path([(0.0, 0.0), (100.0, 0.0)], (50.0, 3.0), HIGHWAY)


def test_match_station_collinear(straight):
    assert match_station(straight, (40.0, 0.0)) == pytest.approx(-60.0)


def test_match_station_second_segment(bent):
    # projection onto the second segment; dense-sampling oracle agrees
    station = match_station(bent, (3.0, 7.0))
    assert station == pytest.approx(-3.0, abs=1e-9)
    oracle = dense_station(bent.waypoints, bent.merge_station, (3.0, 7.0))
    assert station == pytest.approx(oracle, abs=1e-2)


def test_match_station_off_path(straight):
    with pytest.raises(OffPath):
        match_station(straight, (40.0, 6.0), tolerance=5.0)


def test_point_at_station_straight(straight):
    assert point_at_station(straight, -60.0) == pytest.approx((40.0, 0.0))


def test_point_at_station_bent(bent):
    assert point_at_station(bent, -3.0) == pytest.approx((3.0, 7.0))


def test_on_path_roundtrip_tight(bent):
    # on-path points round-trip at solver precision
    for s in (-10.9, -7.3, -3.0, -0.5, 0.0):
        p = point_at_station(bent, s)
        assert abs(match_station(bent, p) - s) <= 1e-9


def test_point_at_station_out_of_range(straight):
    with pytest.raises(OutOfRange):
        point_at_station(straight, 5.0)


def _random_polyline(rng):
    x, y = rng.uniform(-50, 50), rng.uniform(-50, 50)
    heading = rng.uniform(0, 2 * math.pi)
    pts = [(x, y)]
    for _ in range(rng.randint(2, 8)):
        heading += rng.uniform(-0.5, 0.5)
        length = rng.uniform(5.0, 60.0)
        x += length * math.cos(heading)
        y += length * math.sin(heading)
        pts.append((x, y))
    return pts


def test_roundtrip_random_polylines():
    rng = random.Random(7)
    for _ in range(50):
        pts = _random_polyline(rng)
        path = build_path(pts, pts[-1], HIGHWAY)
        lo, hi = path.station_bounds()
        for _ in range(20):
            s = rng.uniform(lo, hi)
            p = point_at_station(path, s)
            assert match_station(path, p) == pytest.approx(s, abs=1e-6)


def test_monotone_station_along_travel():
    rng = random.Random(11)
    pts = _random_polyline(rng)
    path = build_path(pts, pts[-1], HIGHWAY)
    lo, hi = path.station_bounds()
    stations = []
    steps = 200
    for i in range(steps + 1):
        s = lo + (hi - lo) * i / steps
        stations.append(match_station(path, point_at_station(path, s)))
    assert all(b >= a - 1e-9 for a, b in zip(stations, stations[1:]))


def test_dense_sampling_oracle_agreement():
    # 100 random polylines, random nearby probe points, 1 mm brute force
    rng = random.Random(3)
    for _ in range(100):
        pts = _random_polyline(rng)
        path = build_path(pts, pts[-1], HIGHWAY)
        lo, hi = path.station_bounds()
        s = rng.uniform(lo, hi)
        px, py = point_at_station(path, s)
        probe = (px + rng.uniform(-2, 2), py + rng.uniform(-2, 2))
        try:
            station = match_station(path, probe)
        except OffPath:
            continue
        oracle = dense_station(path.waypoints, path.merge_station, probe)
        assert abs(station - oracle) <= 1e-2


def test_default_paths_shape():
    paths = default_paths()
    highway = next(p for p in paths if p.kind == HIGHWAY)
    ramp = next(p for p in paths if p.kind == ON_RAMP)
    assert ramp.merge_station == pytest.approx(267.0)
    assert ramp.total_length == pytest.approx(267.0)
    # ramp ends exactly on the merge point, which both paths share
    assert point_at_station(ramp, 0.0) == pytest.approx((0.0, 0.0), abs=1e-9)
    assert point_at_station(highway, 0.0) == pytest.approx((0.0, 0.0), abs=1e-9)
    lo, hi = highway.station_bounds()
    assert lo < -800.0 and hi > 350.0


def test_path_document_roundtrip(tmp_path, bent):
    doc = paths_to_document([bent])
    restored = paths_from_document(doc)[0]
    assert restored.waypoints == bent.waypoints
    assert restored.merge_station == pytest.approx(bent.merge_station)
    assert restored.kind == bent.kind

"""Waypoint-polyline road geometry and signed merge-point stations.

Paths are planar polylines. Positions along a path are expressed as a
signed station: arc length measured from the merge point, negative
upstream of it, increasing in the direction of travel. Distance to merge
is therefore -station while a vehicle is upstream.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import DegeneratePath, MergePointOffPath, OffPath, OutOfRange

Point = tuple[float, float]

HIGHWAY = "highway-lane"
ON_RAMP = "on-ramp"

DEFAULT_LATERAL_TOLERANCE = 5.0  # m


def _dist(a: Point, b: Point) -> float:
    return math.hypot(b[0] - a[0], b[1] - a[1])


@dataclass(frozen=True)
class PathGeometry:
    """Immutable waypoint polyline with merge-point bookkeeping.

    cum_length[i] is the arc length from the path start to waypoint i;
    merge_station is the arc length of the merge point from the path start.
    grade is a dimensionless slope carried for the power model only.
    """

    path_id: str
    waypoints: tuple[Point, ...]
    cum_length: tuple[float, ...]
    merge_station: float
    kind: str
    grade: float = 0.0

    @property
    def total_length(self) -> float:
        return self.cum_length[-1]

    def station_bounds(self) -> tuple[float, float]:
        """Signed station span covered by the polyline."""
        return -self.merge_station, self.total_length - self.merge_station


def _project_on_segment(p: Point, a: Point, b: Point) -> tuple[float, float]:
    """Return (offset along segment, perpendicular distance) of p onto ab."""
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    seg_len2 = dx * dx + dy * dy
    t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / seg_len2
    t = min(1.0, max(0.0, t))
    cx, cy = ax + t * dx, ay + t * dy
    return t * math.sqrt(seg_len2), math.hypot(p[0] - cx, p[1] - cy)


def _arc_of_point(waypoints, cum_length, position: Point) -> tuple[float, float]:
    """Arc length (from path start) of the closest projection, plus its distance.

    Ties between segments go to the earlier segment.
    """
    best_arc = 0.0
    best_dist = math.inf
    for i in range(len(waypoints) - 1):
        offset, dist = _project_on_segment(position, waypoints[i], waypoints[i + 1])
        if dist < best_dist - 1e-12:
            best_dist = dist
            best_arc = cum_length[i] + offset
    return best_arc, best_dist


def build_path(
    waypoints: list[Point],
    merge_point: Point,
    kind: str,
    path_id: str = "path",
    grade: float = 0.0,
) -> PathGeometry:
    """Build a PathGeometry from waypoints and the merge point.

    The merge point must lie on the polyline (within 0.5 m); its projected
    arc length becomes merge_station.
    """
    if len(waypoints) < 2:
        raise DegeneratePath(f"{path_id}: need at least 2 waypoints")
    pts = tuple((float(x), float(y)) for x, y in waypoints)
    cum = [0.0]
    for i in range(1, len(pts)):
        seg = _dist(pts[i - 1], pts[i])
        if seg <= 0.0:
            raise DegeneratePath(f"{path_id}: waypoints {i - 1} and {i} coincide")
        cum.append(cum[-1] + seg)
    merge_arc, merge_dist = _arc_of_point(pts, cum, (float(merge_point[0]), float(merge_point[1])))
    if merge_dist > 0.5:
        raise MergePointOffPath(
            f"{path_id}: merge point {merge_point} is {merge_dist:.3f} m off the polyline"
        )
    return PathGeometry(
        path_id=path_id,
        waypoints=pts,
        cum_length=tuple(cum),
        merge_station=merge_arc,
        kind=kind,
        grade=float(grade),
    )


def match_station(
    path: PathGeometry,
    position: Point,
    tolerance: float = DEFAULT_LATERAL_TOLERANCE,
) -> float:
    """Signed station of the closest on-path projection of position.

    Raises OffPath when the perpendicular distance exceeds the tolerance.
    """
    arc, dist = _arc_of_point(path.waypoints, path.cum_length, position)
    if dist > tolerance:
        raise OffPath(
            f"{path.path_id}: position {position} is {dist:.3f} m off path "
            f"(tolerance {tolerance} m)"
        )
    return arc - path.merge_station


def point_at_station(path: PathGeometry, station: float) -> Point:
    """Planar point at a signed station; inverse of match_station on-path."""
    lo, hi = path.station_bounds()
    if station < lo - 1e-9 or station > hi + 1e-9:
        raise OutOfRange(
            f"{path.path_id}: station {station:.3f} outside [{lo:.3f}, {hi:.3f}]"
        )
    arc = min(max(station + path.merge_station, 0.0), path.total_length)
    cum = path.cum_length
    # locate owning segment; right-most segment whose start is <= arc
    lo_i, hi_i = 0, len(cum) - 1
    while lo_i + 1 < hi_i:
        mid = (lo_i + hi_i) // 2
        if cum[mid] <= arc:
            lo_i = mid
        else:
            hi_i = mid
    a = path.waypoints[lo_i]
    b = path.waypoints[lo_i + 1]
    seg_len = cum[lo_i + 1] - cum[lo_i]
    t = (arc - cum[lo_i]) / seg_len
    return (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))


# ---------------------------------------------------------------------------
# path files

def paths_to_document(paths: list[PathGeometry]) -> dict:
    return {
        "paths": [
            {
                "path_id": p.path_id,
                "kind": p.kind,
                "grade": p.grade,
                "waypoints": [[x, y] for x, y in p.waypoints],
                "merge_point": list(point_at_station(p, 0.0)),
            }
            for p in paths
        ]
    }


def paths_from_document(doc: dict) -> list[PathGeometry]:
    out = []
    for entry in doc["paths"]:
        out.append(
            build_path(
                [(x, y) for x, y in entry["waypoints"]],
                tuple(entry["merge_point"]),
                entry["kind"],
                path_id=entry["path_id"],
                grade=entry.get("grade", 0.0),
            )
        )
    return out


def write_paths(paths: list[PathGeometry], filename: str) -> None:
    with open(filename, "w", encoding="utf-8") as fh:
        json.dump(paths_to_document(paths), fh, indent=2)
        fh.write("\n")


def read_paths(filename: str) -> list[PathGeometry]:
    with open(filename, encoding="utf-8") as fh:
        return paths_from_document(json.load(fh))


# ---------------------------------------------------------------------------
# default scenario geometry: one straight highway lane joined by a 267 m ramp

RAMP_LENGTH = 267.0  # m

_HIGHWAY_UPSTREAM = 1400.0  # m of lane upstream of the merge point
_HIGHWAY_DOWNSTREAM = 450.0  # m past the merge point

# (segment length m, heading deg) pairs walked ramp-start -> merge point;
# headings ease toward the highway direction, total length exactly 267 m.
_RAMP_SEGMENTS = (
    (40.0, 14.0),
    (40.0, 12.0),
    (40.0, 10.0),
    (40.0, 8.0),
    (40.0, 6.0),
    (30.0, 4.0),
    (20.0, 2.0),
    (17.0, 1.0),
)


def default_paths() -> list[PathGeometry]:
    """Generated default geometry: rightmost highway lane plus the on-ramp."""
    highway_pts = []
    x = -_HIGHWAY_UPSTREAM
    while x < _HIGHWAY_DOWNSTREAM:
        highway_pts.append((x, 0.0))
        x += 50.0
    highway_pts.append((_HIGHWAY_DOWNSTREAM, 0.0))
    highway = build_path(highway_pts, (0.0, 0.0), HIGHWAY, path_id="highway")

    # walk the ramp forward from an arbitrary origin, then translate so the
    # final waypoint lands exactly on the merge point
    pts = [(0.0, 0.0)]
    for length, heading in _RAMP_SEGMENTS:
        rad = math.radians(heading)
        px, py = pts[-1]
        pts.append((px + length * math.cos(rad), py + length * math.sin(rad)))
    end = pts[-1]
    ramp_pts = [(px - end[0], py - end[1]) for px, py in pts]
    ramp = build_path(ramp_pts, (0.0, 0.0), ON_RAMP, path_id="ramp")
    return [highway, ramp]


DEFAULT_INFRA_POSITION: Point = (0.0, -8.0)

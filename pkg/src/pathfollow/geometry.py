"""Polyline paths with arc-length queries, closest-point projection and
corridor membership.

Points are plain ``Point3`` named tuples so the per-tick control code can
do its arithmetic on Python floats; the only loop over the whole path
(projection) runs in a compiled kernel.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from ._jit import njit

MIN_SEGMENT_LENGTH = 1e-6


class Point3(NamedTuple):
    x: float
    y: float
    z: float = 0.0


# skips NamedTuple.__new__'s argument handling; hot paths only
_new = tuple.__new__


class Projection(NamedTuple):
    arclength_s: float
    closest_point: Point3
    cross_track_error: float
    segment_index: int


class PathError(ValueError):
    """Raised for malformed waypoint lists."""


def distance(a: Sequence[float], b: Sequence[float]) -> float:
    return math.sqrt((a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2 + (a[2] - b[2]) ** 2)


def as_point(p: Iterable[float]) -> Point3:
    """Coerce a 2- or 3-sequence into a finite Point3."""
    vals = tuple(float(c) for c in p)
    if len(vals) == 2:
        vals = (vals[0], vals[1], 0.0)
    if len(vals) != 3:
        raise ValueError(f"expected 2 or 3 coordinates, got {len(vals)}")
    if not all(math.isfinite(c) for c in vals):
        raise ValueError(f"non-finite coordinate in {vals}")
    return Point3(*vals)


class Path:
    """Immutable polyline with a corridor of constant half-width.

    Waypoints may be given as 2D or 3D coordinates; 2D input gets z = 0.
    Consecutive duplicates are rejected rather than merged.
    """

    __slots__ = (
        "waypoints",
        "cumulative_arclength",
        "corridor_half_width",
        "_segments",
        "_seglen",
    )

    def __init__(self, waypoints, corridor_half_width: float = 3.0):
        pts = np.array(waypoints, dtype=float)
        if pts.ndim != 2 or pts.shape[1] not in (2, 3):
            raise PathError(f"waypoints must be an (n, 2) or (n, 3) array, got shape {pts.shape}")
        if pts.shape[0] < 2:
            raise PathError("a path needs at least two waypoints")
        if pts.shape[1] == 2:
            pts = np.column_stack([pts, np.zeros(len(pts))])
        if not np.all(np.isfinite(pts)):
            raise PathError("waypoints contain non-finite coordinates")
        if not (math.isfinite(corridor_half_width) and corridor_half_width > 0):
            raise PathError(f"corridor_half_width must be > 0, got {corridor_half_width}")

        dirs = np.diff(pts, axis=0)
        len2 = np.einsum("ij,ij->i", dirs, dirs)
        seglen = np.sqrt(len2)
        bad = np.flatnonzero(seglen <= MIN_SEGMENT_LENGTH)
        if bad.size:
            i = int(bad[0])
            raise PathError(f"waypoints {i} and {i + 1} coincide (segment length {seglen[i]:.3g} m)")

        cum = np.concatenate(([0.0], np.cumsum(seglen)))

        self.waypoints = tuple(Point3(*map(float, p)) for p in pts)
        self.cumulative_arclength = tuple(float(c) for c in cum)
        self.corridor_half_width = float(corridor_half_width)
        self._seglen = tuple(float(c) for c in seglen)
        # one row per segment: start xyz, direction xyz, |dir|^2, arc length at start, |dir|
        segs = np.column_stack([pts[:-1], dirs, len2, cum[:-1], seglen])
        self._segments = np.ascontiguousarray(segs)
        self._segments.flags.writeable = False

    def __len__(self) -> int:
        return len(self.waypoints)

    def __repr__(self) -> str:
        return (
            f"Path({len(self.waypoints)} waypoints, length={self.length:.3f} m, "
            f"half_width={self.corridor_half_width})"
        )

    @property
    def length(self) -> float:
        return self.cumulative_arclength[-1]

    def as_array(self) -> np.ndarray:
        return np.array(self.waypoints)

    def with_corridor(self, half_width: float) -> "Path":
        return Path(self.waypoints, half_width)

    def tangent_at(self, s: float) -> Point3:
        """Unit direction of the segment containing arc length ``s``."""
        i = _segment_at(self, s)
        a, b = self.waypoints[i], self.waypoints[i + 1]
        n = self._seglen[i]
        return Point3((b.x - a.x) / n, (b.y - a.y) / n, (b.z - a.z) / n)


@njit(cache=True)
def _closest_on_polyline(segs, qx, qy, qz):
    best_d2 = np.inf
    best_i = 0
    best_t = 0.0
    for i in range(segs.shape[0]):
        ax = segs[i, 0]
        ay = segs[i, 1]
        az = segs[i, 2]
        dx = segs[i, 3]
        dy = segs[i, 4]
        dz = segs[i, 5]
        t = ((qx - ax) * dx + (qy - ay) * dy + (qz - az) * dz) / segs[i, 6]
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
        ex = ax + t * dx - qx
        ey = ay + t * dy - qy
        ez = az + t * dz - qz
        d2 = ex * ex + ey * ey + ez * ez
        # strict comparison keeps the earliest (smallest arc length) segment on ties
        if d2 < best_d2:
            best_d2 = d2
            best_i = i
            best_t = t
    row = segs[best_i]
    s = row[7] + best_t * row[8]
    return best_i, s, row[0] + best_t * row[3], row[1] + best_t * row[4], row[2] + best_t * row[5], best_d2


def _segment_at(path: Path, s: float) -> int:
    cum = path.cumulative_arclength
    i = bisect_right(cum, s) - 1
    return min(max(i, 0), len(cum) - 2)


def total_arclength(path: Path) -> float:
    return path.cumulative_arclength[-1]


def point_at_arclength(path: Path, s: float) -> Point3:
    """Linear interpolation along the polyline; ``s`` is clamped to [0, length]."""
    cum = path.cumulative_arclength
    wp = path.waypoints
    if s <= 0.0:
        return wp[0]
    if s >= cum[-1]:
        return wp[-1]
    i = bisect_right(cum, s) - 1
    a = wp[i]
    b = wp[i + 1]
    f = (s - cum[i]) / path._seglen[i]
    return _new(Point3, (a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1]), a[2] + f * (b[2] - a[2])))


def project(path: Path, q: Sequence[float]) -> Projection:
    """Closest point on the path to ``q`` (3D distance).

    Ties between equally distant segments resolve to the smaller arc length.
    """
    i, s, cx, cy, cz, d2 = _closest_on_polyline(path._segments, q[0], q[1], q[2])
    return _new(Projection, (s, _new(Point3, (cx, cy, cz)), math.sqrt(d2), i))


def inside_corridor(path: Path, q: Sequence[float]) -> bool:
    # boundary inclusive
    return project(path, q).cross_track_error <= path.corridor_half_width


def resample_from(
    path: Path,
    start: Sequence[float],
    spacing_dh: float,
    count_n: int,
    projection: Projection | None = None,
) -> list[Point3]:
    """Walk ``count_n - 1`` steps of ``spacing_dh`` arc length ahead of ``start``.

    The walk begins at the projection of ``start`` onto the path, but the
    returned list starts with ``start`` itself. Once the walk passes the end
    of the path the final waypoint is appended (unless it duplicates the
    previous element) and the list stops there. A precomputed projection of
    ``start`` may be passed to skip the search.
    """
    if not spacing_dh > 0:
        raise ValueError(f"spacing_dh must be > 0, got {spacing_dh}")
    if count_n < 1:
        raise ValueError(f"count_n must be >= 1, got {count_n}")
    if projection is None:
        projection = project(path, start)
    start = start if type(start) is Point3 else Point3(*start)
    out = [start]
    cum = path.cumulative_arclength
    wp = path.waypoints
    seglen = path._seglen
    last = len(cum) - 1
    s0 = projection.arclength_s
    j = projection.segment_index
    for i in range(1, count_n):
        s = s0 + i * spacing_dh
        if s >= cum[last]:
            end = wp[last]
            prev = out[-1]
            if (end[0] - prev[0]) ** 2 + (end[1] - prev[1]) ** 2 + (end[2] - prev[2]) ** 2 > 1e-18:
                out.append(end)
            break
        while cum[j + 1] <= s:
            j += 1
        a = wp[j]
        b = wp[j + 1]
        f = (s - cum[j]) / seglen[j]
        out.append(_new(Point3, (a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1]), a[2] + f * (b[2] - a[2]))))
    return out

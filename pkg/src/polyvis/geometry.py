"""Primitive geometric types and low-level tests used across the library."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .predicates import CCW, CW, COLLINEAR, orientation


class GeometryError(ValueError):
    """Invalid geometric input."""


@dataclass(frozen=True, slots=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"non-finite point ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y


@dataclass(frozen=True, slots=True)
class Direction:
    """A nonzero direction vector."""

    ux: float
    uy: float

    def __post_init__(self):
        if not (math.isfinite(self.ux) and math.isfinite(self.uy)):
            raise GeometryError(f"non-finite direction ({self.ux}, {self.uy})")
        if self.ux == 0.0 and self.uy == 0.0:
            raise GeometryError("zero direction vector")


class PointInTriangle(Enum):
    INSIDE = "inside"
    ON_EDGE = "on_edge"
    ON_VERTEX = "on_vertex"
    OUTSIDE = "outside"


def orient(a: Point, b: Point, c: Point) -> int:
    """Exact orientation of the triple (a, b, c): CCW, CW or COLLINEAR."""
    return orientation(a.x, a.y, b.x, b.y, c.x, c.y)


def point_in_triangle(q: Point, tri, eps: float = 0.0):
    """Classify q against a ccw triangle (a, b, c).

    Returns (PointInTriangle, index).  The index names the edge i
    (from tri[i] to tri[(i+1) % 3]) for ON_EDGE, the corner for ON_VERTEX,
    and is None otherwise.

    With eps == 0 the classification is exact.  With eps > 0 a point that
    the exact test rejects is still accepted as ON_EDGE of its nearest edge
    when its signed perpendicular distance to every edge line is >= -eps
    (distances in map units).
    """
    a, b, c = tri
    if q.x == a.x and q.y == a.y:
        return PointInTriangle.ON_VERTEX, 0
    if q.x == b.x and q.y == b.y:
        return PointInTriangle.ON_VERTEX, 1
    if q.x == c.x and q.y == c.y:
        return PointInTriangle.ON_VERTEX, 2

    s0 = orientation(a.x, a.y, b.x, b.y, q.x, q.y)
    s1 = orientation(b.x, b.y, c.x, c.y, q.x, q.y)
    s2 = orientation(c.x, c.y, a.x, a.y, q.x, q.y)

    if s0 != CW and s1 != CW and s2 != CW:
        zeros = (s0 == COLLINEAR) + (s1 == COLLINEAR) + (s2 == COLLINEAR)
        if zeros == 0:
            return PointInTriangle.INSIDE, None
        # on one edge line, strictly between its endpoints (corner equality
        # was ruled out above; two zero signs would force a corner)
        if s0 == COLLINEAR:
            return PointInTriangle.ON_EDGE, 0
        if s1 == COLLINEAR:
            return PointInTriangle.ON_EDGE, 1
        return PointInTriangle.ON_EDGE, 2

    if eps > 0.0:
        dists = []
        for (px, py), (rx, ry) in (((a.x, a.y), (b.x, b.y)),
                                   ((b.x, b.y), (c.x, c.y)),
                                   ((c.x, c.y), (a.x, a.y))):
            ex = rx - px
            ey = ry - py
            ln = math.hypot(ex, ey)
            dists.append((ex * (q.y - py) - ey * (q.x - px)) / ln)
        if min(dists) >= -eps:
            nearest = min(range(3), key=lambda i: abs(dists[i]))
            return PointInTriangle.ON_EDGE, nearest

    return PointInTriangle.OUTSIDE, None


def min_signed_edge_distance(q: Point, tri) -> float:
    """Smallest signed perpendicular distance from q to the edge lines of a
    ccw triangle (positive inside)."""
    a, b, c = tri
    best = math.inf
    for (px, py), (rx, ry) in (((a.x, a.y), (b.x, b.y)),
                               ((b.x, b.y), (c.x, c.y)),
                               ((c.x, c.y), (a.x, a.y))):
        ex = rx - px
        ey = ry - py
        d = (ex * (q.y - py) - ey * (q.x - px)) / math.hypot(ex, ey)
        if d < best:
            best = d
    return best


def ray_segment_intersection(origin: Point, direction: Direction, seg_a: Point,
                             seg_b: Point):
    """First intersection of the ray origin + t*direction (t >= 0) with the
    closed segment [seg_a, seg_b].

    Returns (Point, t) with the smallest admissible t, or None.  The crossing
    decision is made with exact orientation tests; the returned point is the
    floating-point evaluation.  Collinear overlaps yield the overlap point
    nearest to the origin.
    """
    ox, oy = origin.x, origin.y
    ux, uy = direction.ux, direction.uy
    ax, ay = seg_a.x, seg_a.y
    bx, by = seg_b.x, seg_b.y

    # which side of the ray's supporting line each endpoint lies on (exact)
    sa = _cross_sign(ux, uy, ax - ox, ay - oy)
    sb = _cross_sign(ux, uy, bx - ox, by - oy)

    if sa == 0 and sb == 0:
        # segment collinear with the ray line: nearest overlap point wins
        ta = _param_along(ox, oy, ux, uy, ax, ay)
        tb = _param_along(ox, oy, ux, uy, bx, by)
        if ta < 0.0 and tb < 0.0:
            return None
        if min(ta, tb) <= 0.0 <= max(ta, tb):
            return Point(ox, oy), 0.0
        if ta <= tb:
            return Point(ax, ay), ta
        return Point(bx, by), tb

    if sa == sb:
        return None  # both endpoints strictly on one side of the ray line

    # The segment crosses the supporting line exactly once.  Decide whether
    # the crossing is on the forward ray via exact signs:
    #   t = cross(a-o, b-a) / cross(u, b-a), and sign(cross(u, b-a)) follows
    # from sa/sb while cross(a-o, b-a) equals orient2d(o, a, b).
    num_sign = orientation(ox, oy, ax, ay, bx, by)
    den_sign = 1 if sb > sa else -1
    t_sign = num_sign * den_sign
    if t_sign < 0:
        return None
    if t_sign == 0:
        return Point(ox, oy), 0.0

    if sa == 0:
        return Point(ax, ay), _param_along(ox, oy, ux, uy, ax, ay)
    if sb == 0:
        return Point(bx, by), _param_along(ox, oy, ux, uy, bx, by)

    ex = bx - ax
    ey = by - ay
    denom = ux * ey - uy * ex
    t = ((ax - ox) * ey - (ay - oy) * ex) / denom
    s = ((ax - ox) * uy - (ay - oy) * ux) / denom
    if s < 0.0:
        s = 0.0
    elif s > 1.0:
        s = 1.0
    return Point(ax + s * ex, ay + s * ey), max(t, 0.0)


def _cross_sign(ux, uy, vx, vy):
    """Exact sign of ux*vy - uy*vx for the given doubles."""
    return orientation(0.0, 0.0, ux, uy, vx, vy)


def _param_along(ox, oy, ux, uy, px, py):
    """Parameter of p's projection along the dominant axis of u."""
    if abs(ux) >= abs(uy):
        return (px - ox) / ux
    return (py - oy) / uy


def segments_properly_intersect(a: Point, b: Point, c: Point, d: Point) -> bool:
    """True iff the open segments ab and cd cross transversally."""
    o1 = orient(a, b, c)
    o2 = orient(a, b, d)
    o3 = orient(c, d, a)
    o4 = orient(c, d, b)
    return o1 * o2 < 0 and o3 * o4 < 0


def point_on_segment(q: Point, a: Point, b: Point) -> bool:
    """True iff q lies on the closed segment ab (exact)."""
    if orient(a, b, q) != COLLINEAR:
        return False
    return (min(a.x, b.x) <= q.x <= max(a.x, b.x)
            and min(a.y, b.y) <= q.y <= max(a.y, b.y))


def signed_area(points) -> float:
    """Shoelace area of a closed vertex cycle (positive for ccw)."""
    total = 0.0
    n = len(points)
    for i in range(n):
        p = points[i]
        r = points[(i + 1) % n]
        total += p.x * r.y - r.x * p.y
    return 0.5 * total


def dedupe_consecutive(points):
    """Drop bit-exact consecutive duplicates from a vertex cycle."""
    out = []
    for p in points:
        if not out or p.x != out[-1].x or p.y != out[-1].y:
            out.append(p)
    while len(out) > 1 and out[0].x == out[-1].x and out[0].y == out[-1].y:
        out.pop()
    return out


def canonical_cycle(points):
    """Rotate a vertex cycle so the lexicographically smallest (x, y) vertex
    comes first, after merging exact consecutive duplicates."""
    pts = dedupe_consecutive(points)
    if not pts:
        return pts
    k = min(range(len(pts)), key=lambda i: (pts[i].x, pts[i].y))
    return pts[k:] + pts[:k]


def squared_distance(a: Point, b: Point) -> float:
    dx = b.x - a.x
    dy = b.y - a.y
    return dx * dx + dy * dy


def segment_point_distance(px, py, ax, ay, bx, by) -> float:
    """Euclidean distance from point (px,py) to closed segment [(ax,ay),(bx,by)]."""
    ex = bx - ax
    ey = by - ay
    qx = px - ax
    qy = py - ay
    denom = ex * ex + ey * ey
    if denom == 0.0:
        return math.hypot(qx, qy)
    t = (qx * ex + qy * ey) / denom
    if t <= 0.0:
        return math.hypot(qx, qy)
    if t >= 1.0:
        return math.hypot(px - bx, py - by)
    return abs(ex * qy - ey * qx) / math.sqrt(denom)

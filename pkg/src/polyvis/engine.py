"""Visibility queries by recursive triangle expansion.

Every query starts from the located triangle (or vertex fan) of the seed
and grows restricted angular views across triangle edges: crossing an
edge narrows the view between its endpoints, reaching a far vertex inside
the view splits it in two, and reaching a constrained edge records the
visible portion and stops.  Views are maintained purely as restricting
vertex ids, so each traversal step costs two exact orientation tests and
no coordinates are constructed until the radial stage resolves the
recorded restrictions into intersection points.

Region output flows through a pipeline: abstract region (ids and
restrictions only) -> radial region (concrete ccw boundary) -> optional
circle intersection (range-limited queries) -> optional arc sampling ->
plain polygon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .environment import Ring
from .geometry import (Direction, GeometryError, Point,
                       ray_segment_intersection, segment_point_distance)
from .location import Coincidence, PointLocation
from .mesh import BOUNDARY, TriMesh
from .predicates import CCW, COLLINEAR, CW, orientation, ray_forward, ray_side


class MalformedRegionError(GeometryError):
    """An expected geometric resolution failed; indicates an engine bug,
    not a user error."""


@dataclass
class QueryStats:
    triangles_traversed: int = 0
    views_split: int = 0
    boundary_edges_hit: int = 0


@dataclass(frozen=True)
class RegionNode:
    """A region boundary corner that is an environment vertex."""
    vertex: int


@dataclass(frozen=True)
class RegionSegment:
    """A visible portion of one mesh edge.

    right/left are the edge's endpoint vertex ids in ccw order around the
    seed.  A restriction names the vertex whose seed-anchored ray cuts the
    edge; None means the portion extends to the bit-exact endpoint.
    """
    edge: int
    right: int
    left: int
    right_restriction: int | None
    left_restriction: int | None


@dataclass
class AbstractVisibilityRegion:
    seed: Point
    seed_vertex: int | None
    elements: list
    # seeds accepted by the relaxed location ladder may sit slightly
    # outside the environment; their views can wrap and make restriction
    # rays unresolvable, which the radial stage then heals instead of
    # treating as an engine bug
    relaxed: bool = False


class VertexKind(Enum):
    ENV_VERTEX = "env_vertex"
    BOUNDARY_INTERSECTION = "boundary_intersection"
    ARC_POINT = "arc_point"


class EdgeKind(Enum):
    ON_BOUNDARY = "on_boundary"
    FREE_CHORD = "free_chord"
    ARC = "arc"


@dataclass(frozen=True)
class RadialVertex:
    point: Point
    kind: VertexKind
    ref: int | None = None  # vertex id or edge id, depending on kind


@dataclass
class RadialVisibilityRegion:
    """Closed ccw boundary cycle around the seed.

    edge_kinds[i] annotates the edge from vertices[i] to
    vertices[(i+1) % len] as (EdgeKind, edge id or None).
    """
    seed: Point
    seed_vertex: int | None
    vertices: list[RadialVertex]
    edge_kinds: list[tuple]
    radius: float | None = None


# ---------------------------------------------------------------------------
# expansion core


def _start_items(mesh: TriMesh, loc: PointLocation, q: Point):
    """Initial stack items in ccw order, plus the effective seed.

    Vertex starts expand every wedge of the (snapped) vertex; interior
    edge starts expand the union of both incident triangles; boundary edge
    starts record the edge itself and expand the other two.
    """
    tv = mesh.tri_verts
    items = []
    if loc.snapped_vertex is not None:
        v0 = loc.snapped_vertex
        for wedge in mesh.vertex_wedges[v0]:
            items.append(("node", v0))
            for t in wedge:
                i = tv[t].index(v0)
                j = (i + 1) % 3
                items.append(("cross", t, j, tv[t][j], tv[t][(j + 1) % 3]))
        return items, mesh.point(v0), v0

    t0 = loc.triangle
    if loc.coincidence is Coincidence.ON_EDGE:
        edge = mesh.edges[loc.edge]
        if not edge.is_boundary:
            t1, t2 = edge.triangles
            for t in (t1, t2):
                k = mesh.tri_edges[t].index(loc.edge)
                for j in ((k + 1) % 3, (k + 2) % 3):
                    items.append(("cross", t, j, tv[t][j], tv[t][(j + 1) % 3]))
            return items, q, None
        k0 = mesh.tri_edges[t0].index(loc.edge)
        items.append(("seg", loc.edge, tv[t0][k0], tv[t0][(k0 + 1) % 3],
                      None, None))
        for j in ((k0 + 1) % 3, (k0 + 2) % 3):
            items.append(("cross", t0, j, tv[t0][j], tv[t0][(j + 1) % 3]))
        return items, q, None

    for j in (0, 1, 2):
        items.append(("cross", t0, j, tv[t0][j], tv[t0][(j + 1) % 3]))
    return items, q, None


def visibility_region(mesh: TriMesh, loc: PointLocation, q: Point,
                      d: float | None = None):
    """Expand the full visibility region around q.

    Returns (AbstractVisibilityRegion, QueryStats).  With d given,
    branches whose expansion edge lies entirely beyond distance d are cut
    short; the result is then a superset of the range-limited region, to
    be clipped against the circle by intersect_with_circle.
    """
    stats = QueryStats()
    items, seed, seed_vertex = _start_items(mesh, loc, q)
    qx = seed.x
    qy = seed.y
    px = mesh.px
    py = mesh.py
    tv = mesh.tri_verts
    tn = mesh.tri_nbrs
    te = mesh.tri_edges
    elements = []

    stack = list(reversed(items))
    while stack:
        item = stack.pop()
        kind = item[0]
        if kind == "node":
            elements.append(RegionNode(item[1]))
            continue
        if kind == "seg":
            _, eid, right, left, rr, lr = item
            elements.append(RegionSegment(eid, right, left, rr, lr))
            stats.boundary_edges_hit += 1
            continue

        _, t, j, r_vid, l_vid = item  # cross edge j of t with view (r, l)
        a = tv[t][j]
        b = tv[t][(j + 1) % 3]
        n = tn[t][j]
        if n == BOUNDARY or (d is not None and segment_point_distance(
                qx, qy, px[a], py[a], px[b], py[b]) > d):
            rr = None
            if r_vid != a and orientation(qx, qy, px[r_vid], py[r_vid],
                                          px[a], py[a]) == CW:
                rr = r_vid
            lr = None
            if l_vid != b and orientation(qx, qy, px[b], py[b],
                                          px[l_vid], py[l_vid]) == CW:
                lr = l_vid
            elements.append(RegionSegment(te[t][j], a, b, rr, lr))
            stats.boundary_edges_hit += 1
            continue

        k = tn[n].index(t)
        stats.triangles_traversed += 1
        far = tv[n][(k + 2) % 3]
        s_r = orientation(qx, qy, px[r_vid], py[r_vid], px[far], py[far])
        s_l = orientation(qx, qy, px[far], py[far], px[l_vid], py[l_vid])
        if s_r != CW and s_l != CW:
            # far vertex within the closed view: split right/far/left
            stats.views_split += 1
            stack.append(("cross", n, (k + 2) % 3, far, l_vid))
            stack.append(("node", far))
            stack.append(("cross", n, (k + 1) % 3, r_vid, far))
        elif s_r == CW:
            stack.append(("cross", n, (k + 2) % 3, r_vid, l_vid))
        else:
            stack.append(("cross", n, (k + 1) % 3, r_vid, l_vid))

    region = AbstractVisibilityRegion(seed, seed_vertex, elements,
                                      relaxed=loc.eps1_used is not None)
    return region, stats


# ---------------------------------------------------------------------------
# radial pipeline


def _ray_through_point_hits_segment(seed: Point, w: Point, a: Point,
                                    b: Point):
    """Intersection of the ray from seed through w with segment [a, b].

    All crossing decisions are exact orientation tests on the actual
    points; the returned coordinates are the floating-point evaluation.
    """
    sa = orientation(seed.x, seed.y, w.x, w.y, a.x, a.y)
    sb = orientation(seed.x, seed.y, w.x, w.y, b.x, b.y)
    if sa == 0 and sb == 0:
        # collinear overlap: nearest forward overlap point
        if _on_segment_between(a, b, seed):
            return seed
        da = _on_segment_between(seed, w, a) or _on_segment_between(seed, a, w)
        db = _on_segment_between(seed, w, b) or _on_segment_between(seed, b, w)
        if da and db:
            return a if (abs(a.x - seed.x) + abs(a.y - seed.y)
                         <= abs(b.x - seed.x) + abs(b.y - seed.y)) else b
        if da:
            return a
        if db:
            return b
        return None
    if sa == sb:
        return None
    num_sign = orientation(seed.x, seed.y, a.x, a.y, b.x, b.y)
    den_sign = 1 if sb > sa else -1
    t_sign = num_sign * den_sign
    if t_sign < 0:
        return None
    if t_sign == 0:
        return seed
    if sa == 0:
        return a
    if sb == 0:
        return b
    ux = w.x - seed.x
    uy = w.y - seed.y
    ex = b.x - a.x
    ey = b.y - a.y
    denom = ux * ey - uy * ex
    s = ((a.x - seed.x) * uy - (a.y - seed.y) * ux) / denom
    if s < 0.0:
        s = 0.0
    elif s > 1.0:
        s = 1.0
    return Point(a.x + s * ex, a.y + s * ey)


def to_radial(mesh: TriMesh, region: AbstractVisibilityRegion
              ) -> RadialVisibilityRegion:
    """Resolve an abstract region's restrictions into concrete boundary
    points, producing the ccw radial form."""
    seed = region.seed
    raw: list[tuple[RadialVertex, object]] = []  # (vertex, kind of edge to next)

    def resolve(edge_id, restriction_vid):
        e = mesh.edges[edge_id]
        a = mesh.point(e.vertices[0])
        b = mesh.point(e.vertices[1])
        w = mesh.point(restriction_vid)
        hit = _ray_through_point_hits_segment(seed, w, a, b)
        if hit is None:
            if region.relaxed:
                # an epsilon-accepted exterior seed can wrap its views;
                # collapse the unresolvable portion onto the restricting
                # vertex
                return w
            raise MalformedRegionError(
                f"restriction ray through vertex {restriction_vid} misses "
                f"edge {edge_id}")
        return hit

    for el in region.elements:
        if isinstance(el, RegionNode):
            raw.append((RadialVertex(mesh.point(el.vertex),
                                     VertexKind.ENV_VERTEX, el.vertex), None))
            continue
        if el.right_restriction is None:
            first = RadialVertex(mesh.point(el.right), VertexKind.ENV_VERTEX,
                                 el.right)
        else:
            first = RadialVertex(resolve(el.edge, el.right_restriction),
                                 VertexKind.BOUNDARY_INTERSECTION, el.edge)
        if el.left_restriction is None:
            second = RadialVertex(mesh.point(el.left), VertexKind.ENV_VERTEX,
                                  el.left)
        else:
            second = RadialVertex(resolve(el.edge, el.left_restriction),
                                  VertexKind.BOUNDARY_INTERSECTION, el.edge)
        raw.append((first, ("edge", el.edge)))
        raw.append((second, None))

    vertices: list[RadialVertex] = []
    kinds_to_next: list[object] = []
    for vert, kind in raw:
        if vertices and _same_point(vertices[-1].point, vert.point):
            if (vertices[-1].kind is not VertexKind.ENV_VERTEX
                    and vert.kind is VertexKind.ENV_VERTEX):
                vertices[-1] = vert
            kinds_to_next[-1] = kind  # the merged vertex's outgoing edge
            continue
        vertices.append(vert)
        kinds_to_next.append(kind)
    while len(vertices) > 1 and _same_point(vertices[0].point,
                                            vertices[-1].point):
        if (vertices[-1].kind is VertexKind.ENV_VERTEX
                and vertices[0].kind is not VertexKind.ENV_VERTEX):
            vertices[0] = vertices[-1]
        vertices.pop()
        kinds_to_next.pop()

    edge_kinds = []
    m = len(vertices)
    for i in range(m):
        marked = kinds_to_next[i]
        if marked is not None:
            edge_kinds.append((EdgeKind.ON_BOUNDARY, marked[1]))
            continue
        u = vertices[i]
        v = vertices[(i + 1) % m]
        if (u.kind is VertexKind.ENV_VERTEX
                and v.kind is VertexKind.ENV_VERTEX):
            eid = mesh.edge_id(u.ref, v.ref)
            if eid is not None and mesh.edges[eid].is_boundary:
                edge_kinds.append((EdgeKind.ON_BOUNDARY, eid))
                continue
        edge_kinds.append((EdgeKind.FREE_CHORD, None))

    return RadialVisibilityRegion(seed, region.seed_vertex, vertices,
                                  edge_kinds)


def _same_point(p: Point, r: Point) -> bool:
    return p.x == r.x and p.y == r.y


def _segment_disk_interval(p0: Point, p1: Point, sx, sy, r2):
    """Parameter span [lo, hi] of segment p0->p1 inside the closed disk, or
    (None, None).  Endpoint membership is authoritative: an endpoint within
    the disk forces its parameter bound, keeping the interval consistent
    with per-vertex classification."""
    in0 = (p0.x - sx) ** 2 + (p0.y - sy) ** 2 <= r2
    in1 = (p1.x - sx) ** 2 + (p1.y - sy) ** 2 <= r2
    if in0 and in1:
        return 0.0, 1.0
    ex = p1.x - p0.x
    ey = p1.y - p0.y
    fx = p0.x - sx
    fy = p0.y - sy
    a = ex * ex + ey * ey
    if a == 0.0:
        return (0.0, 1.0) if in0 else (None, None)
    b = 2.0 * (fx * ex + fy * ey)
    c = fx * fx + fy * fy - r2
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        if in0:
            return 0.0, 1.0
        if in1:
            return 0.0, 1.0
        return None, None
    s = math.sqrt(disc)
    t_lo = (-b - s) / (2.0 * a)
    t_hi = (-b + s) / (2.0 * a)
    lo = 0.0 if in0 else max(t_lo, 0.0)
    hi = 1.0 if in1 else min(t_hi, 1.0)
    if lo > hi or (not in0 and not in1 and (t_hi <= 0.0 or t_lo >= 1.0)):
        return None, None
    return lo, hi


def intersect_with_circle(region: RadialVisibilityRegion,
                          d: float) -> RadialVisibilityRegion:
    """Clip the radial region against the disk of radius d about its seed.

    Boundary portions beyond the circle are replaced by ccw arcs; the
    crossing points become ARC_POINT vertices.
    """
    if not d > 0.0:
        raise GeometryError(f"radius must be positive, got {d}")
    seed = region.seed
    sx = seed.x
    sy = seed.y
    r2 = d * d
    verts = region.vertices
    kinds = region.edge_kinds
    m = len(verts)

    if all((v.point.x - sx) ** 2 + (v.point.y - sy) ** 2 <= r2
           for v in verts):
        return RadialVisibilityRegion(seed, region.seed_vertex, list(verts),
                                      list(kinds), d)

    # alternating stream of vertices and edge kinds; "gap" marks a stretch
    # outside the disk that an arc must bridge
    items: list[tuple] = []
    any_inside = False
    for i in range(m):
        v0 = verts[i]
        v1 = verts[(i + 1) % m]
        p0 = v0.point
        p1 = v1.point
        lo, hi = _segment_disk_interval(p0, p1, sx, sy, r2)
        if lo is None:
            items.append(("gap",))
            continue
        any_inside = True
        if lo > 0.0:
            items.append(("gap",))
            items.append(("v", RadialVertex(
                Point(p0.x + lo * (p1.x - p0.x), p0.y + lo * (p1.y - p0.y)),
                VertexKind.ARC_POINT)))
        else:
            items.append(("v", v0))
        if hi < 1.0:
            items.append(("k", kinds[i]))
            items.append(("v", RadialVertex(
                Point(p0.x + hi * (p1.x - p0.x), p0.y + hi * (p1.y - p0.y)),
                VertexKind.ARC_POINT)))
            items.append(("gap",))
        else:
            items.append(("k", kinds[i]))

    if not any_inside:
        return RadialVisibilityRegion(
            seed, region.seed_vertex,
            [RadialVertex(Point(sx + d, sy), VertexKind.ARC_POINT),
             RadialVertex(Point(sx - d, sy), VertexKind.ARC_POINT)],
            [(EdgeKind.ARC, None), (EdgeKind.ARC, None)], d)

    # rotate the stream to start at a vertex, then fold gap runs into arcs
    first_v = next(i for i, it in enumerate(items) if it[0] == "v")
    stream = items[first_v:] + items[:first_v]
    out_verts: list[RadialVertex] = []
    out_kinds: list[tuple] = []
    pending_kind = None
    saw_gap = False
    for item in stream:
        tag = item[0]
        if tag == "gap":
            saw_gap = True
        elif tag == "k":
            pending_kind = item[1]
        else:
            if out_verts:
                out_kinds.append((EdgeKind.ARC, None) if saw_gap else
                                 (pending_kind if pending_kind is not None
                                  else (EdgeKind.FREE_CHORD, None)))
            out_verts.append(item[1])
            pending_kind = None
            saw_gap = False
    # connective from the final vertex back to the first closes the cycle
    out_kinds.append((EdgeKind.ARC, None) if saw_gap else
                     (pending_kind if pending_kind is not None
                      else (EdgeKind.FREE_CHORD, None)))
    # merge coincident consecutive vertices (the connective between them is
    # zero-length and dropped)
    i = 0
    while i < len(out_verts) and len(out_verts) > 1:
        j = (i + 1) % len(out_verts)
        if _same_point(out_verts[i].point, out_verts[j].point):
            out_verts.pop(j)
            out_kinds.pop(i)
        else:
            i += 1
    return RadialVisibilityRegion(seed, region.seed_vertex, out_verts,
                                  out_kinds, d)


def sample_arc_edges(region: RadialVisibilityRegion,
                     max_angle: float = math.pi / 180.0
                     ) -> RadialVisibilityRegion:
    """Replace every arc edge by a fan of chords subtending at most
    max_angle at the seed."""
    if not max_angle > 0.0:
        raise GeometryError(f"max_angle must be positive, got {max_angle}")
    if not any(k[0] is EdgeKind.ARC for k in region.edge_kinds):
        return RadialVisibilityRegion(region.seed, region.seed_vertex,
                                      list(region.vertices),
                                      list(region.edge_kinds), region.radius)
    seed = region.seed
    d = region.radius
    out_verts: list[RadialVertex] = []
    out_kinds: list[tuple] = []
    m = len(region.vertices)
    for i in range(m):
        v0 = region.vertices[i]
        kind = region.edge_kinds[i]
        out_verts.append(v0)
        if kind[0] is not EdgeKind.ARC:
            out_kinds.append(kind)
            continue
        v1 = region.vertices[(i + 1) % m]
        a0 = math.atan2(v0.point.y - seed.y, v0.point.x - seed.x)
        a1 = math.atan2(v1.point.y - seed.y, v1.point.x - seed.x)
        span = (a1 - a0) % (2.0 * math.pi)
        if span == 0.0 and not _same_point(v0.point, v1.point):
            span = 2.0 * math.pi
        steps = max(1, math.ceil(span / max_angle))
        for s in range(1, steps):
            ang = a0 + span * s / steps
            out_verts.append(RadialVertex(
                Point(seed.x + d * math.cos(ang), seed.y + d * math.sin(ang)),
                VertexKind.ARC_POINT))
            out_kinds.append((EdgeKind.FREE_CHORD, None))
        out_kinds.append((EdgeKind.FREE_CHORD, None))
    return RadialVisibilityRegion(region.seed, region.seed_vertex, out_verts,
                                  out_kinds, region.radius)


def to_polygon(region: RadialVisibilityRegion) -> Ring:
    """The region boundary as a plain ccw ring (arcs must be sampled
    first)."""
    if any(k[0] is EdgeKind.ARC for k in region.edge_kinds):
        raise GeometryError("region still contains arc edges; call "
                            "sample_arc_edges first")
    pts: list[Point] = []
    for v in region.vertices:
        if not pts or not _same_point(pts[-1], v.point):
            pts.append(v.point)
    while len(pts) > 1 and _same_point(pts[0], pts[-1]):
        pts.pop()
    if len(pts) < 3:
        raise GeometryError("degenerate region with fewer than 3 distinct "
                            "boundary points")
    return Ring(tuple(pts))


# ---------------------------------------------------------------------------
# directed queries


def _segment_walk_start(mesh: TriMesh, loc: PointLocation, q: Point):
    """Effective seed and candidate start triangles for a directed walk."""
    if loc.snapped_vertex is not None:
        seed = mesh.point(loc.snapped_vertex)
        return seed, None, loc.snapped_vertex
    if loc.coincidence is Coincidence.ON_EDGE:
        tris = mesh.edges[loc.edge].triangles
        return q, list(tris), None
    return q, [loc.triangle], None


def _point_in_tri(mesh: TriMesh, t: int, p: Point) -> bool:
    a, b, c = mesh.tri_verts[t]
    px = mesh.px
    py = mesh.py
    return (orientation(px[a], py[a], px[b], py[b], p.x, p.y) != CW
            and orientation(px[b], py[b], px[c], py[c], p.x, p.y) != CW
            and orientation(px[c], py[c], px[a], py[a], p.x, p.y) != CW)


def _on_segment_between(a: Point, b: Point, p: Point) -> bool:
    """p within the closed axis box of collinear points a, b."""
    return (min(a.x, b.x) <= p.x <= max(a.x, b.x)
            and min(a.y, b.y) <= p.y <= max(a.y, b.y))


def two_point_visible(mesh: TriMesh, loc: PointLocation, q: Point, p: Point,
                      d: float | None = None,
                      stats: QueryStats | None = None,
                      trace: list | None = None) -> bool:
    """True iff the segment from q to p stays inside the environment (and is
    no longer than d, when given).

    The walk crosses only triangles the segment passes through; grazing
    through vertices and along edges counts as visible (the environment is
    closed).
    """
    seed, start_tris, seed_vertex = _segment_walk_start(mesh, loc, q)
    if d is not None and math.hypot(p.x - seed.x, p.y - seed.y) > d:
        return False
    if stats is None:
        stats = QueryStats()
    if _same_point(seed, p):
        return True

    if seed_vertex is not None:
        return _walk_from_vertex(mesh, seed_vertex, p, stats, trace)

    sx = seed.x
    sy = seed.y
    px = mesh.px
    py = mesh.py
    tv = mesh.tri_verts

    for t in start_tris:
        stats.triangles_traversed += 1
        if trace is not None:
            trace.append(t)
        if _point_in_tri(mesh, t, p):
            return True
    # exit through a corner exactly on the segment line?
    for t in start_tris:
        for v in tv[t]:
            if orientation(sx, sy, p.x, p.y, px[v], py[v]) == COLLINEAR:
                vp = mesh.point(v)
                if _on_segment_between(seed, p, vp) and not _same_point(
                        vp, seed):
                    return _walk_from_vertex(mesh, v, p, stats, trace)
    # find the edge of a start triangle crossed by the ray towards p
    for t in start_tris:
        for j in (0, 1, 2):
            a = tv[t][j]
            b = tv[t][(j + 1) % 3]
            s_a = orientation(sx, sy, px[a], py[a], p.x, p.y)
            s_b = orientation(sx, sy, p.x, p.y, px[b], py[b])
            if s_a == CCW and s_b == CCW:
                return _walk_steps(mesh, seed, p, t, j, stats, trace)
    return False  # target behind a wall the seed lies on


def _walk_from_vertex(mesh: TriMesh, v: int, p: Point,
                      stats: QueryStats, trace) -> bool:
    """Continue a directed walk from an environment vertex towards p."""
    px = mesh.px
    py = mesh.py
    tv = mesh.tri_verts
    guard = 0
    while True:
        guard += 1
        if guard > 4 * len(mesh.triangles) + 16:
            raise MalformedRegionError("directed walk failed to terminate")
        f = mesh.point(v)
        if _same_point(f, p):
            return True
        slide_target = None
        enter = None
        for wedge in mesh.vertex_wedges[v]:
            for t in wedge:
                i = tv[t].index(v)
                x = tv[t][(i + 1) % 3]
                y = tv[t][(i + 2) % 3]
                s_x = orientation(f.x, f.y, px[x], py[x], p.x, p.y)
                if s_x == COLLINEAR:
                    xp = mesh.point(x)
                    if _on_segment_between(f, p, xp) or _on_segment_between(
                            f, xp, p):
                        stats.triangles_traversed += 1
                        if trace is not None:
                            trace.append(t)
                        if _on_segment_between(f, xp, p):
                            return True  # p lies on the spoke edge
                        slide_target = x
                        break
                    continue
                s_y = orientation(f.x, f.y, p.x, p.y, px[y], py[y])
                if s_x == CCW and s_y != CW:
                    if s_y == COLLINEAR:
                        yp = mesh.point(y)
                        if _on_segment_between(f, yp, p):
                            stats.triangles_traversed += 1
                            if trace is not None:
                                trace.append(t)
                            return True
                        if _on_segment_between(f, p, yp):
                            stats.triangles_traversed += 1
                            if trace is not None:
                                trace.append(t)
                            slide_target = y
                            break
                        continue
                    enter = (t, i)
                    break
            if slide_target is not None or enter is not None:
                break
        if slide_target is not None:
            v = slide_target
            continue
        if enter is None:
            return False  # direction leaves the environment at this vertex
        t, i = enter
        stats.triangles_traversed += 1
        if trace is not None:
            trace.append(t)
        if _point_in_tri(mesh, t, p):
            return True
        return _walk_steps(mesh, mesh.point(v), p, t, (i + 1) % 3, stats,
                           trace)


def _walk_steps(mesh: TriMesh, seed: Point, p: Point, t: int, j: int,
                stats: QueryStats, trace) -> bool:
    """Cross triangles along segment seed->p starting through edge j of t."""
    px = mesh.px
    py = mesh.py
    tv = mesh.tri_verts
    tn = mesh.tri_nbrs
    sx = seed.x
    sy = seed.y
    guard = 0
    while True:
        guard += 1
        if guard > 4 * len(mesh.triangles) + 16:
            raise MalformedRegionError("directed walk failed to terminate")
        a = tv[t][j]
        b = tv[t][(j + 1) % 3]
        n = tn[t][j]
        if n == BOUNDARY:
            # blocked unless p lies exactly on this wall
            ap = mesh.point(a)
            bp = mesh.point(b)
            return (orientation(ap.x, ap.y, bp.x, bp.y, p.x, p.y)
                    == COLLINEAR and _on_segment_between(ap, bp, p))
        k = tn[n].index(t)
        stats.triangles_traversed += 1
        if trace is not None:
            trace.append(n)
        if _point_in_tri(mesh, n, p):
            return True
        far = tv[n][(k + 2) % 3]
        s = orientation(sx, sy, p.x, p.y, px[far], py[far])
        if s == COLLINEAR:
            return _walk_from_vertex(mesh, far, p, stats, trace)
        if s == CCW:
            # far lies left of the ray, so the segment exits between the
            # right entry endpoint and far
            t, j = n, (k + 1) % 3
        else:
            t, j = n, (k + 2) % 3


def shoot_ray(mesh: TriMesh, loc: PointLocation, q: Point, u: Direction,
              d: float | None = None,
              stats: QueryStats | None = None) -> Point | None:
    """First boundary point hit by the ray from q along u, or None when the
    hit lies beyond distance d.

    Every environment vertex is a boundary point, so a ray passing exactly
    through a vertex stops there.
    """
    if stats is None:
        stats = QueryStats()
    seed, start_tris, seed_vertex = _segment_walk_start(mesh, loc, q)
    sx = seed.x
    sy = seed.y
    ux = u.ux
    uy = u.uy
    px = mesh.px
    py = mesh.py
    tv = mesh.tri_verts
    tn = mesh.tri_nbrs

    def within_range(pt: Point):
        if d is not None and math.hypot(pt.x - sx, pt.y - sy) > d:
            return None
        return pt

    def vertex_hit(v: int):
        return within_range(mesh.point(v))

    state = None
    if seed_vertex is not None:
        v0 = seed_vertex
        f = mesh.point(v0)
        for wedge in mesh.vertex_wedges[v0]:
            for t in wedge:
                i = tv[t].index(v0)
                x = tv[t][(i + 1) % 3]
                y = tv[t][(i + 2) % 3]
                s_x = ray_side(f.x, f.y, ux, uy, px[x], py[x])
                if s_x == 0 and ray_forward(f.x, f.y, ux, uy,
                                            px[x], py[x]) > 0:
                    return vertex_hit(x)
                s_y = ray_side(f.x, f.y, ux, uy, px[y], py[y])
                if s_y == 0 and ray_forward(f.x, f.y, ux, uy,
                                            px[y], py[y]) > 0:
                    return vertex_hit(y)
                if s_x == -1 and s_y == 1:
                    state = (t, (i + 1) % 3)
                    break
            if state is not None:
                break
        if state is None:
            return vertex_hit(v0)  # ray leaves the environment at the seed
    else:
        # the located edge itself crosses the ray at parameter zero; skip it
        # so only genuine forward exits are candidates
        skip_edge = (loc.edge if loc.coincidence is Coincidence.ON_EDGE
                     else None)
        for t in start_tris:
            stats.triangles_traversed += 1
            for v in tv[t]:
                if (ray_side(sx, sy, ux, uy, px[v], py[v]) == 0
                        and ray_forward(sx, sy, ux, uy, px[v], py[v]) > 0):
                    return vertex_hit(v)
            for j in (0, 1, 2):
                if mesh.tri_edges[t][j] == skip_edge:
                    continue
                a = tv[t][j]
                b = tv[t][(j + 1) % 3]
                # ray leaves through edge j: a strictly right, b strictly left
                if (ray_side(sx, sy, ux, uy, px[a], py[a]) == -1
                        and ray_side(sx, sy, ux, uy, px[b], py[b]) == 1):
                    state = (t, j)
                    break
            if state is not None:
                break
        if state is None:
            # a boundary seed whose ray points outside meets the boundary at
            # the seed itself
            if (loc.coincidence is Coincidence.ON_EDGE
                    and mesh.edges[loc.edge].is_boundary):
                return within_range(seed)
            return None

    guard = 0
    while True:
        guard += 1
        if guard > 4 * len(mesh.triangles) + 16:
            raise MalformedRegionError("ray walk failed to terminate")
        t, j = state
        a = tv[t][j]
        b = tv[t][(j + 1) % 3]
        n = tn[t][j]
        if n == BOUNDARY or (d is not None and segment_point_distance(
                sx, sy, px[a], py[a], px[b], py[b]) > d):
            if n != BOUNDARY:
                return None  # range cut before any boundary
            hit = ray_segment_intersection(seed, u, mesh.point(a),
                                           mesh.point(b))
            if hit is None:
                raise MalformedRegionError("ray missed its blocking edge")
            return within_range(hit[0])
        k = tn[n].index(t)
        stats.triangles_traversed += 1
        far = tv[n][(k + 2) % 3]
        s = ray_side(sx, sy, ux, uy, px[far], py[far])
        if s == 0:
            return vertex_hit(far)
        if s == 1:
            state = (n, (k + 1) % 3)  # far left: exit the right far edge
        else:
            state = (n, (k + 2) % 3)


def visible_vertices(mesh: TriMesh, loc: PointLocation, q: Point,
                     among: set[int] | None = None,
                     d: float | None = None,
                     stats: QueryStats | None = None) -> set[int]:
    """Vertex ids visible from q (optionally restricted to `among` and to
    range d)."""
    if stats is None:
        stats = QueryStats()
    items, seed, seed_vertex = _start_items(mesh, loc, q)
    out: set[int] = set()
    if seed_vertex is not None:
        out.add(seed_vertex)
    collect = _expand_collect_vertices(mesh, seed, items, stats, d)
    out |= collect
    if d is not None:
        out = {v for v in out
               if math.hypot(mesh.px[v] - seed.x, mesh.py[v] - seed.y) <= d}
    if among is not None:
        out &= among
    return out


def _expand_collect_vertices(mesh: TriMesh, seed: Point, items, stats,
                             d) -> set[int]:
    qx = seed.x
    qy = seed.y
    px = mesh.px
    py = mesh.py
    tv = mesh.tri_verts
    tn = mesh.tri_nbrs
    out: set[int] = set()

    stack = list(reversed(items))
    while stack:
        item = stack.pop()
        kind = item[0]
        if kind == "node":
            out.add(item[1])
            continue
        if kind == "seg":
            out.add(item[2])
            out.add(item[3])
            continue
        _, t, j, r_vid, l_vid = item
        a = tv[t][j]
        b = tv[t][(j + 1) % 3]
        # the crossed edge's endpoints within the closed view are visible
        for v in (a, b):
            if v not in out:
                if (orientation(qx, qy, px[r_vid], py[r_vid], px[v], py[v])
                        != CW
                        and orientation(qx, qy, px[v], py[v],
                                        px[l_vid], py[l_vid]) != CW):
                    out.add(v)
        n = tn[t][j]
        if n == BOUNDARY:
            continue
        if d is not None and segment_point_distance(
                qx, qy, px[a], py[a], px[b], py[b]) > d:
            continue
        k = tn[n].index(t)
        stats.triangles_traversed += 1
        far = tv[n][(k + 2) % 3]
        s_r = orientation(qx, qy, px[r_vid], py[r_vid], px[far], py[far])
        s_l = orientation(qx, qy, px[far], py[far], px[l_vid], py[l_vid])
        if s_r != CW and s_l != CW:
            stats.views_split += 1
            out.add(far)
            stack.append(("cross", n, (k + 2) % 3, far, l_vid))
            stack.append(("cross", n, (k + 1) % 3, r_vid, far))
        elif s_r == CW:
            stack.append(("cross", n, (k + 2) % 3, r_vid, l_vid))
        else:
            stack.append(("cross", n, (k + 1) % 3, r_vid, l_vid))
    return out


def visible_points(mesh: TriMesh, loc: PointLocation, q: Point,
                   sites, d: float | None = None,
                   stats: QueryStats | None = None):
    """Indices of sites visible from q.

    sites is a sequence of (Point, PointLocation-or-None); sites without a
    location are skipped and reported.  Returns (visible ids, skipped ids).
    """
    if stats is None:
        stats = QueryStats()
    items, seed, seed_vertex = _start_items(mesh, loc, q)
    qx = seed.x
    qy = seed.y
    px = mesh.px
    py = mesh.py
    tv = mesh.tri_verts
    tn = mesh.tri_nbrs

    by_triangle: dict[int, list[int]] = {}
    skipped = []
    for idx, (pt, site_loc) in enumerate(sites):
        if site_loc is None:
            skipped.append(idx)
            continue
        if d is not None and math.hypot(pt.x - qx, pt.y - qy) > d:
            continue
        by_triangle.setdefault(site_loc.triangle, []).append(idx)

    out: set[int] = set()

    def collect(t, r_vid, l_vid):
        for idx in by_triangle.get(t, ()):
            if idx in out:
                continue
            pt = sites[idx][0]
            if (orientation(qx, qy, px[r_vid], py[r_vid], pt.x, pt.y) != CW
                    and orientation(qx, qy, pt.x, pt.y,
                                    px[l_vid], py[l_vid]) != CW):
                out.add(idx)

    start_tris = set()
    for item in items:
        if item[0] == "cross":
            start_tris.add(item[1])
    for t in start_tris:
        for idx in by_triangle.get(t, ()):
            out.add(idx)

    stack = list(reversed(items))
    while stack:
        item = stack.pop()
        if item[0] != "cross":
            continue
        _, t, j, r_vid, l_vid = item
        a = tv[t][j]
        b = tv[t][(j + 1) % 3]
        n = tn[t][j]
        if n == BOUNDARY:
            continue
        if d is not None and segment_point_distance(
                qx, qy, px[a], py[a], px[b], py[b]) > d:
            continue
        k = tn[n].index(t)
        stats.triangles_traversed += 1
        collect(n, r_vid, l_vid)
        far = tv[n][(k + 2) % 3]
        s_r = orientation(qx, qy, px[r_vid], py[r_vid], px[far], py[far])
        s_l = orientation(qx, qy, px[far], py[far], px[l_vid], py[l_vid])
        if s_r != CW and s_l != CW:
            stats.views_split += 1
            stack.append(("cross", n, (k + 2) % 3, far, l_vid))
            stack.append(("cross", n, (k + 1) % 3, r_vid, far))
        elif s_r == CW:
            stack.append(("cross", n, (k + 2) % 3, r_vid, l_vid))
        else:
            stack.append(("cross", n, (k + 1) % 3, r_vid, l_vid))

    return out, skipped


def canonical_polygon(points) -> list[Point]:
    """Rotate a vertex cycle to start at the lexicographically smallest
    (x, y) vertex, merging exact consecutive duplicates, for stable
    comparison and serialization."""
    pts = []
    for p in points:
        if not pts or not _same_point(pts[-1], p):
            pts.append(p)
    while len(pts) > 1 and _same_point(pts[0], pts[-1]):
        pts.pop()
    if not pts:
        return pts
    k = min(range(len(pts)), key=lambda i: (pts[i].x, pts[i].y))
    return pts[k:] + pts[:k]

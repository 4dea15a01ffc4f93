"""Constrained Delaunay triangulation and the adjacency structure the
expansion queries traverse.

The construction runs in three stages: an unconstrained Delaunay
triangulation of the environment vertices (qhull when available, with a
pure-Python incremental fallback), recovery of every environment edge as
a constrained mesh edge, and an exact Lawson flip pass that restores the
Delaunay property wherever the recovery disturbed it.  Triangles outside
the see-through space (beyond the outer boundary or inside holes) are
dropped by flooding from the interior side of each constraint.

All orientation and in-circle decisions use the exact adaptive predicates,
so degenerate inputs (grid-aligned points, cocircular quads) cannot break
the topology.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .environment import PolygonalEnvironment
from .geometry import GeometryError, Point, signed_area
from .predicates import CCW, CW, COLLINEAR, in_circle, orientation

try:
    import numpy as _np
    from scipy.spatial import Delaunay as _Delaunay
except ImportError:  # pure-python incremental path still works
    _Delaunay = None


class MeshError(GeometryError):
    """Triangulation failed or the input violates mesh preconditions."""


BOUNDARY = -1


@dataclass(frozen=True)
class MeshTriangle:
    vertices: tuple[int, int, int]   # ccw
    neighbors: tuple[int, int, int]  # across edge k = (v[k], v[k+1]); -1 none
    edges: tuple[int, int, int]      # edge ids, same indexing


@dataclass(frozen=True)
class MeshEdge:
    vertices: tuple[int, int]
    triangles: tuple[int, ...]       # 1 or 2 incident triangle ids
    is_boundary: bool


class TriMesh:
    """Immutable triangulation of an environment.

    points are exactly the environment vertices (geometrically deduplicated,
    so a vertex shared by two touching holes appears once).  vertex_wedges
    stores, per vertex, its incident triangles grouped into rotational
    wedges, each ordered ccw; vertices where the boundary pinches
    (weakly simple) have more than one wedge.
    """

    def __init__(self, points, triangles, edges, vertex_wedges,
                 env_vertex_ids, constraint_pairs):
        self.points: list[Point] = points
        self.triangles: list[MeshTriangle] = triangles
        self.edges: list[MeshEdge] = edges
        self.vertex_wedges: list[list[list[int]]] = vertex_wedges
        self.env_vertex_ids: list[list[int]] = env_vertex_ids
        self._constraints = constraint_pairs
        # flat coordinate caches for hot traversal loops
        self.px = [p.x for p in points]
        self.py = [p.y for p in points]
        self.tri_verts = [t.vertices for t in triangles]
        self.tri_nbrs = [t.neighbors for t in triangles]
        self.tri_edges = [t.edges for t in triangles]
        self._edge_ids = {}
        for eid, e in enumerate(edges):
            u, v = e.vertices
            self._edge_ids[(u, v)] = eid
            self._edge_ids[(v, u)] = eid

    def __len__(self):
        return len(self.triangles)

    def point(self, v: int) -> Point:
        return self.points[v]

    def edge_id(self, u: int, v: int):
        return self._edge_ids.get((u, v))

    def is_constraint(self, u: int, v: int) -> bool:
        return (u, v) in self._constraints or (v, u) in self._constraints

    def triangle_points(self, t: int):
        a, b, c = self.tri_verts[t]
        return self.points[a], self.points[b], self.points[c]


def ordered_fan(mesh: TriMesh, v: int) -> list[int]:
    """All triangles incident to v in ccw order (wedges concatenated).

    Every environment vertex lies on the boundary, so fans are open chains
    starting at a boundary edge.
    """
    return [t for wedge in mesh.vertex_wedges[v] for t in wedge]


def outer_fan_edges(mesh: TriMesh, v: int) -> list[tuple[int, int]]:
    """The expansion frontier for a vertex query: fan edges not incident to
    v (and never shared between two fan triangles), as (edge id, triangle id)
    in fan order."""
    out = []
    for wedge in mesh.vertex_wedges[v]:
        for t in wedge:
            a, b, c = mesh.tri_verts[t]
            i = 0 if a == v else (1 if b == v else 2)
            out.append((mesh.tri_edges[t][(i + 1) % 3], t))
    return out


class _Builder:
    """Mutable triangulation under construction.

    Triangles are [a, b, c] ccw vertex-id triples (None when dead); the
    directed-edge map keeps adjacency queries O(1) through every mutation.
    """

    def __init__(self, px, py):
        self.px = px
        self.py = py
        self.tris: list = []
        self.edge_tri: dict[tuple[int, int], int] = {}
        self.vert_tri: dict[int, int] = {}

    def orient(self, a, b, c):
        return orientation(self.px[a], self.py[a], self.px[b], self.py[b],
                           self.px[c], self.py[c])

    def orient_pt(self, a, b, x, y):
        return orientation(self.px[a], self.py[a], self.px[b], self.py[b], x, y)

    def add_tri(self, a, b, c):
        tid = len(self.tris)
        self.tris.append([a, b, c])
        self.edge_tri[(a, b)] = tid
        self.edge_tri[(b, c)] = tid
        self.edge_tri[(c, a)] = tid
        self.vert_tri[a] = tid
        self.vert_tri[b] = tid
        self.vert_tri[c] = tid
        return tid

    def kill_tri(self, tid):
        a, b, c = self.tris[tid]
        for key in ((a, b), (b, c), (c, a)):
            if self.edge_tri.get(key) == tid:
                del self.edge_tri[key]
        self.tris[tid] = None

    def neighbor(self, u, v):
        """Triangle on the other side of directed edge u->v (directed v->u)."""
        return self.edge_tri.get((v, u))

    def alive(self):
        return [i for i, t in enumerate(self.tris) if t is not None]


def _spatial_order(px, py, ids):
    """Snake-order point ids through a coarse grid for locality."""
    if len(ids) < 16:
        return list(ids)
    minx = min(px[i] for i in ids)
    maxx = max(px[i] for i in ids)
    miny = min(py[i] for i in ids)
    maxy = max(py[i] for i in ids)
    g = max(2, int(math.sqrt(len(ids))))
    sx = (maxx - minx) or 1.0
    sy = (maxy - miny) or 1.0

    def key(i):
        gx = min(g - 1, int((px[i] - minx) / sx * g))
        gy = min(g - 1, int((py[i] - miny) / sy * g))
        return (gy * g + (gx if gy % 2 == 0 else g - 1 - gx), px[i], py[i])

    return sorted(ids, key=key)


def _delaunay_incremental(px, py):
    """Bowyer-Watson insertion with exact predicates.

    Returns a _Builder holding the Delaunay triangulation of the points plus
    a surrounding super-triangle (vertex ids n, n+1, n+2).
    """
    n = len(px)
    minx, maxx = min(px), max(px)
    miny, maxy = min(py), max(py)
    span = max(maxx - minx, maxy - miny, 1.0)
    cx = (minx + maxx) / 2.0
    cy = (miny + maxy) / 2.0
    big = span * 65536.0
    px = px + [cx - 2.0 * big, cx + 2.0 * big, cx]
    py = py + [cy - big, cy - big, cy + 2.0 * big]

    b = _Builder(px, py)
    b.add_tri(n, n + 1, n + 2)
    rng = random.Random(0x5eed)
    last = 0

    for p in _spatial_order(px, py, range(n)):
        x = px[p]
        y = py[p]
        # walk towards the containing triangle
        t = last if b.tris[last] is not None else next(
            i for i, tr in enumerate(b.tris) if tr is not None)
        steps = 0
        limit = 4 * (len(b.tris) + 4)
        while True:
            steps += 1
            if steps > limit:
                raise MeshError("point-location walk failed to terminate")
            ta, tb, tc = b.tris[t]
            exits = []
            if b.orient_pt(ta, tb, x, y) == CW:
                exits.append((tb, ta))
            if b.orient_pt(tb, tc, x, y) == CW:
                exits.append((tc, tb))
            if b.orient_pt(tc, ta, x, y) == CW:
                exits.append((ta, tc))
            if not exits:
                break
            u, v = exits[0] if len(exits) == 1 else rng.choice(exits)
            nxt = b.edge_tri.get((u, v))
            if nxt is None:
                raise MeshError("walk escaped the triangulation")
            t = nxt

        # grow the cavity of triangles whose circumcircle contains p
        cavity = {t}
        stack = [t]
        while stack:
            cur = stack.pop()
            ca, cb, cc = b.tris[cur]
            for u, v in ((cb, ca), (cc, cb), (ca, cc)):
                nb = b.edge_tri.get((u, v))
                if nb is None or nb in cavity:
                    continue
                na, nb_, nc = b.tris[nb]
                if in_circle(px[na], py[na], px[nb_], py[nb_],
                             px[nc], py[nc], x, y) > 0:
                    cavity.add(nb)
                    stack.append(nb)

        # rim = directed edges of cavity triangles whose twin is outside
        rim = []
        for cur in cavity:
            ca, cb, cc = b.tris[cur]
            for u, v in ((ca, cb), (cb, cc), (cc, ca)):
                tw = b.edge_tri.get((v, u))
                if tw is None or tw not in cavity:
                    rim.append((u, v))
        for cur in cavity:
            b.kill_tri(cur)
        for u, v in rim:
            last = b.add_tri(u, v, p)
    return b, (n, n + 1, n + 2)


def _delaunay_qhull(px, py):
    """Initial Delaunay triangulation via scipy/qhull, exactness-checked.

    Returns a _Builder, or None when qhull is unavailable or its output
    fails the exact orientation audit (the incremental path then takes
    over).
    """
    if _Delaunay is None:
        return None
    pts = _np.column_stack([px, py])
    try:
        dt = _Delaunay(pts)
    except Exception:
        return None
    if len(dt.coplanar):
        return None
    b = _Builder(list(px), list(py))
    for a, c, d in dt.simplices:
        a, c, d = int(a), int(c), int(d)
        s = b.orient(a, c, d)
        if s == COLLINEAR:
            return None
        if s == CW:
            c, d = d, c
        if (a, c) in b.edge_tri or (c, d) in b.edge_tri or (d, a) in b.edge_tri:
            return None
        b.add_tri(a, c, d)
    return b


def _forward(b: _Builder, va: int, vb: int, w: int) -> bool:
    """For w collinear with va->vb: does w lie in the forward direction?
    Parallel vectors make the dot product cancellation-free, so the float
    sign is reliable here."""
    return ((b.px[w] - b.px[va]) * (b.px[vb] - b.px[va])
            + (b.py[w] - b.py[va]) * (b.py[vb] - b.py[va])) > 0.0


def _walk_constraint(b: _Builder, va: int, vb: int):
    """Triangles crossed by segment va->vb plus the rim vertices on each
    side, in crossing order."""
    # locate the wedge at va containing the direction towards vb
    start = None
    t0 = b.vert_tri.get(va)
    if t0 is None or b.tris[t0] is None:
        t0 = next(i for i, tr in enumerate(b.tris)
                  if tr is not None and va in tr)
    seen = set()
    queue = [t0]
    while queue:
        t = queue.pop()
        if t in seen or b.tris[t] is None:
            continue
        seen.add(t)
        tri = b.tris[t]
        if va not in tri:
            continue
        i = tri.index(va)
        x = tri[(i + 1) % 3]
        y = tri[(i + 2) % 3]
        sx = b.orient(va, x, vb)
        sy = b.orient(va, vb, y)
        for s, w in ((sx, x), (sy, y)):
            if s == COLLINEAR and _forward(b, va, vb, w):
                # a mesh vertex inside the open constraint segment; no
                # Delaunay edge can contain a third vertex, so nothing in
                # front of it can be recovered
                raise MeshError(
                    f"vertex {w} lies on constraint segment {va}-{vb}")
        if sx == CCW and sy == CCW:
            start = (t, x, y)
            break
        for u, v in ((x, va), (va, y)):
            nb = b.edge_tri.get((u, v))
            if nb is not None:
                queue.append(nb)
    if start is None:
        raise MeshError(f"no wedge at vertex {va} faces constraint {va}-{vb}")

    t, right, left = start
    crossed = [t]
    rim_right = [right]
    rim_left = [left]
    while True:
        nxt = b.neighbor(right, left)
        if nxt is None:
            raise MeshError(f"constraint {va}-{vb} escaped the triangulation")
        crossed.append(nxt)
        tri = b.tris[nxt]
        z = next(w for w in tri if w != right and w != left)
        if z == vb:
            return crossed, rim_right, rim_left
        s = b.orient(va, vb, z)
        if s == COLLINEAR:
            raise MeshError(
                f"vertex {z} lies exactly on constraint segment {va}-{vb}")
        if s == CCW:
            rim_left.append(z)
            left = z
        else:
            rim_right.append(z)
            right = z


def _fill_cavity(b: _Builder, a: int, bb: int, chain: list[int], left: bool):
    """Delaunay-retriangulate a pseudo-polygon cavity.

    chain holds the rim vertices strictly between a and bb in boundary
    order; the cavity lies left (or right) of the directed edge a->bb.
    """
    if not chain:
        return
    c_idx = 0
    for k in range(1, len(chain)):
        c = chain[c_idx]
        p = chain[k]
        if left:
            inside = in_circle(b.px[a], b.py[a], b.px[bb], b.py[bb],
                               b.px[c], b.py[c], b.px[p], b.py[p])
        else:
            inside = in_circle(b.px[a], b.py[a], b.px[c], b.py[c],
                               b.px[bb], b.py[bb], b.px[p], b.py[p])
        if inside > 0:
            c_idx = k
    c = chain[c_idx]
    if left:
        b.add_tri(a, bb, c)
    else:
        b.add_tri(a, c, bb)
    _fill_cavity(b, a, c, chain[:c_idx], left)
    _fill_cavity(b, c, bb, chain[c_idx + 1:], left)


def _recover_constraints(b: _Builder, constraints):
    for va, vb in constraints:
        if (va, vb) in b.edge_tri or (vb, va) in b.edge_tri:
            continue
        crossed, rim_right, rim_left = _walk_constraint(b, va, vb)
        for t in crossed:
            b.kill_tri(t)
        _fill_cavity(b, va, vb, rim_left, True)
        _fill_cavity(b, va, vb, rim_right, False)


def _flood_interior(b: _Builder, constraints):
    """Triangle ids on the see-through side, flooding from the interior
    side of every constraint without crossing any constraint."""
    constraint_set = set(constraints) | {(v, u) for u, v in constraints}
    seeds = []
    for u, v in constraints:
        t = b.edge_tri.get((u, v))  # interior lies left of each directed edge
        if t is None:
            raise MeshError(f"constraint edge {u}-{v} missing after recovery")
        seeds.append(t)
    interior = set()
    stack = seeds
    while stack:
        t = stack.pop()
        if t in interior or b.tris[t] is None:
            continue
        interior.add(t)
        a, c, d = b.tris[t]
        for u, v in ((a, c), (c, d), (d, a)):
            if (u, v) in constraint_set:
                continue
            nb = b.edge_tri.get((v, u))
            if nb is not None and nb not in interior:
                stack.append(nb)
    return interior


def _lawson_flips(b: _Builder, interior: set, constraint_set: set):
    """Restore the Delaunay property inside the domain with exact flips."""
    px = b.px
    py = b.py
    queue = []
    enqueued = set()
    for t in interior:
        a, c, d = b.tris[t]
        for u, v in ((a, c), (c, d), (d, a)):
            key = (u, v) if u < v else (v, u)
            if key not in constraint_set and key not in enqueued:
                enqueued.add(key)
                queue.append(key)
    guard = 0
    limit = 64 * (len(interior) + 16) + 100000
    while queue:
        guard += 1
        if guard > limit:
            raise MeshError("flip pass failed to terminate")
        u, v = queue.pop()
        enqueued.discard((u, v))
        t1 = b.edge_tri.get((u, v))
        t2 = b.edge_tri.get((v, u))
        if t1 is None or t2 is None or t1 not in interior or t2 not in interior:
            continue
        z1 = next(w for w in b.tris[t1] if w != u and w != v)
        z2 = next(w for w in b.tris[t2] if w != u and w != v)
        if in_circle(px[u], py[u], px[v], py[v], px[z1], py[z1],
                     px[z2], py[z2]) <= 0:
            continue
        interior.discard(t1)
        interior.discard(t2)
        b.kill_tri(t1)
        b.kill_tri(t2)
        interior.add(b.add_tri(u, z2, z1))
        interior.add(b.add_tri(v, z1, z2))
        for e in ((u, z2), (z2, v), (v, z1), (z1, u)):
            key = e if e[0] < e[1] else (e[1], e[0])
            if key not in constraint_set and key not in enqueued:
                enqueued.add(key)
                queue.append(key)


def triangulate(env: PolygonalEnvironment, method: str = "auto") -> TriMesh:
    """Constrained Delaunay triangulation of the environment.

    All environment edges become constrained mesh edges; no vertices are
    added.  method selects the initial-triangulation backend: "auto"
    (qhull with incremental fallback), "qhull", or "incremental".
    """
    # deduplicate geometric points; weakly simple vertices collapse here
    vid_of: dict[tuple[float, float], int] = {}
    points: list[Point] = []
    env_vertex_ids: list[list[int]] = []
    for ring in env.rings:
        ids = []
        for p in ring:
            key = (p.x, p.y)
            vid = vid_of.get(key)
            if vid is None:
                vid = len(points)
                vid_of[key] = vid
                points.append(p)
            ids.append(vid)
        env_vertex_ids.append(ids)

    constraints = []
    for ids in env_vertex_ids:
        n = len(ids)
        for i in range(n):
            constraints.append((ids[i], ids[(i + 1) % n]))

    px = [p.x for p in points]
    py = [p.y for p in points]

    builder = None
    if method in ("auto", "qhull"):
        builder = _delaunay_qhull(px, py)
        if builder is None and method == "qhull":
            raise MeshError("qhull backend unavailable or rejected the input")
    if builder is None:
        if method not in ("auto", "incremental"):
            raise MeshError(f"unknown triangulation method {method!r}")
        builder, super_ids = _delaunay_incremental(px, py)
        for t, tri in enumerate(builder.tris):
            if tri is not None and any(v in super_ids for v in tri):
                builder.kill_tri(t)

    _recover_constraints(builder, constraints)
    interior = _flood_interior(builder, constraints)
    constraint_keys = {(min(u, v), max(u, v)) for u, v in constraints}
    _lawson_flips(builder, interior, constraint_keys)

    entries = sum(len(r) for r in env.rings)
    # every geometric coincidence of ring vertices (weakly simple pinch)
    # removes two triangles relative to the disjoint-hole count n + 2h - 2
    pinch_excess = entries - len(points)
    expected = entries + 2 * len(env.holes) - 2 - 2 * pinch_excess
    mesh = _freeze(builder, interior, points, env_vertex_ids, constraint_keys)
    tri_area = math.fsum(
        signed_area(mesh.triangle_points(t)) for t in range(len(mesh)))
    env_area = env.area
    if abs(tri_area - env_area) > 1e-9 * max(abs(env_area), 1.0):
        raise MeshError(
            f"triangulation covers area {tri_area}, environment has "
            f"{env_area}; the environment interior is likely disconnected "
            f"or invalid")
    if len(mesh) != expected:
        raise MeshError(
            f"triangle count {len(mesh)} != n + 2h - 2 = {expected}")
    return mesh


def _freeze(b: _Builder, interior, points, env_vertex_ids, constraint_keys):
    order = sorted(interior)
    new_id = {t: i for i, t in enumerate(order)}
    tri_verts = []
    for t in order:
        a, c, d = b.tris[t]
        tri_verts.append((a, c, d))

    edge_ids: dict[tuple[int, int], int] = {}
    edge_tris: list[list[int]] = []
    edge_verts: list[tuple[int, int]] = []
    tri_edges = []
    tri_nbrs = []
    for t, (a, c, d) in zip(order, tri_verts):
        nbrs = []
        eids = []
        for u, v in ((a, c), (c, d), (d, a)):
            tw = b.edge_tri.get((v, u))
            nbrs.append(new_id[tw] if tw is not None and tw in interior
                        else BOUNDARY)
            key = (u, v) if u < v else (v, u)
            eid = edge_ids.get(key)
            if eid is None:
                eid = len(edge_verts)
                edge_ids[key] = eid
                edge_verts.append(key)
                edge_tris.append([])
            edge_tris[eid].append(new_id[t])
            eids.append(eid)
        tri_nbrs.append(tuple(nbrs))
        tri_edges.append(tuple(eids))

    edges = []
    for eid, (u, v) in enumerate(edge_verts):
        is_b = (u, v) in constraint_keys
        tris = tuple(sorted(edge_tris[eid]))
        if is_b and len(tris) != 1:
            raise MeshError(
                f"boundary edge {u}-{v} has {len(tris)} incident triangles")
        edges.append(MeshEdge((u, v), tris, is_b))

    triangles = [MeshTriangle(tri_verts[i], tri_nbrs[i], tri_edges[i])
                 for i in range(len(order))]

    vertex_wedges = _build_wedges(points, triangles)
    return TriMesh(points, triangles, edges, vertex_wedges, env_vertex_ids,
                   constraint_keys)


def _pseudo_angle(dx: float, dy: float) -> float:
    """Monotone stand-in for atan2 used only for deterministic ordering."""
    d = abs(dx) + abs(dy)
    if d == 0.0:
        return 0.0
    p = dx / d
    return (3.0 + p) if dy < 0 else (1.0 - p)


def _build_wedges(points, triangles):
    incident: list[list[int]] = [[] for _ in points]
    for t, tri in enumerate(triangles):
        for v in tri.vertices:
            incident[v].append(t)

    wedges_per_vertex: list[list[list[int]]] = []
    for v, inc in enumerate(incident):
        if not inc:
            wedges_per_vertex.append([])
            continue
        remaining = set(inc)
        # ccw-next triangle around v crosses the local edge (v_{i+2}, v);
        # a wedge starts where the cw-side edge (v, v_{i+1}) has no neighbor
        starts = []
        for t in inc:
            tri = triangles[t]
            i = tri.vertices.index(v)
            if tri.neighbors[i] == BOUNDARY or tri.neighbors[i] not in remaining:
                starts.append(t)
        wedges = []
        for s in starts:
            if s not in remaining:
                continue
            wedge = []
            t = s
            while t is not None and t in remaining:
                remaining.discard(t)
                wedge.append(t)
                tri = triangles[t]
                i = tri.vertices.index(v)
                nxt = tri.neighbors[(i + 2) % 3]
                t = nxt if nxt != BOUNDARY else None
            wedges.append(wedge)
        if remaining:
            raise MeshError(f"vertex {v} has a closed triangle fan; every "
                            f"environment vertex must lie on the boundary")

        def wedge_key(w, v=v):
            tri = triangles[w[0]]
            i = tri.vertices.index(v)
            nb = tri.vertices[(i + 1) % 3]
            return _pseudo_angle(points[nb].x - points[v].x,
                                 points[nb].y - points[v].y)

        wedges.sort(key=wedge_key)
        wedges_per_vertex.append(wedges)
    return wedges_per_vertex

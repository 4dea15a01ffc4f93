"""Brute-force exact reference for visibility queries.

Entirely independent of the mesh and the expansion engine: it works
straight off the environment edges with every decision made in exact
arithmetic.  Doubles are lifted to integers on a common power-of-two
scale (every finite double is a dyadic rational) and derived points are
kept as exact rationals.  numpy evaluates the bulk tests in floating
point first with a conservative error bound; only flagged near-ties are
recomputed exactly, so the reference stays usable as a per-query
comparator.

Intended for desk-scale environments (a few hundred vertices);
throughput is explicitly not a goal.
"""

from __future__ import annotations

import math
from functools import cmp_to_key

import numpy as np

from .environment import PolygonalEnvironment
from .exact import Rational, _scaled
from .geometry import Point

_FILTER = 2.0 ** -44  # generous forward-error bound for 3-op float exprs
_SCALE_PAD = 160      # headroom (bits) for query points finer than the map


class OracleError(RuntimeError):
    """Internal inconsistency in the reference computation."""


def _sign(x):
    return (x > 0) - (x < 0)


class Oracle:
    """Exact visibility reference bound to one environment."""

    def __init__(self, env: PolygonalEnvironment):
        self.env = env
        coords = []
        spans = []
        for ring in env.rings:
            base = len(coords) // 2
            for p in ring:
                coords.append(p.x)
                coords.append(p.y)
            spans.append((base, len(ring)))

        ints = _scaled(coords + [1.0])
        base_one = ints[-1]
        ints = ints[:-1]
        self.shift = _SCALE_PAD
        self.one = base_one << _SCALE_PAD  # integer meaning "1.0"
        nv = len(ints) // 2
        self.vx = [ints[2 * i] << _SCALE_PAD for i in range(nv)]
        self.vy = [ints[2 * i + 1] << _SCALE_PAD for i in range(nv)]

        ea, eb = [], []
        for base, n in spans:
            for i in range(n):
                ea.append(base + i)
                eb.append(base + (i + 1) % n)
        self.ea = ea
        self.eb = eb
        self.fax = np.array([coords[2 * i] for i in ea])
        self.fay = np.array([coords[2 * i + 1] for i in ea])
        self.fbx = np.array([coords[2 * i] for i in eb])
        self.fby = np.array([coords[2 * i + 1] for i in eb])
        self.n_edges = len(ea)
        self.vert_points = [Point(coords[2 * i], coords[2 * i + 1])
                            for i in range(nv)]
        self._spans = spans
        self._cone_cache: dict = {}

    # -- exact lifting ----------------------------------------------------

    def lift(self, x: float, y: float):
        """Exact integer coordinates of a double point on the oracle scale."""
        return _lift_one(x, self.one), _lift_one(y, self.one)

    # -- bulk sign kernels -------------------------------------------------

    def _edge_side_of_ray(self, qx, qy, ux, uy, iq, iu):
        """Exact signs of cross(u, a-q) and cross(u, b-q) for every edge."""
        iqx, iqy = iq
        iux, iuy = iu
        t1 = ux * (self.fay - qy)
        t2 = uy * (self.fax - qx)
        sa = t1 - t2
        unc_a = np.abs(sa) <= _FILTER * (np.abs(t1) + np.abs(t2))
        t1 = ux * (self.fby - qy)
        t2 = uy * (self.fbx - qx)
        sb = t1 - t2
        unc_b = np.abs(sb) <= _FILTER * (np.abs(t1) + np.abs(t2))
        sa = np.sign(sa).astype(np.int64)
        sb = np.sign(sb).astype(np.int64)
        for arr, unc, verts in ((sa, unc_a, self.ea), (sb, unc_b, self.eb)):
            if unc.any():
                for i in np.nonzero(unc)[0]:
                    v = verts[i]
                    arr[i] = _sign(iux * (self.vy[v] - iqy)
                                   - iuy * (self.vx[v] - iqx))
        return sa, sb

    def _edge_side_matrix(self, qx, qy, iq, dirs):
        """Exact side signs of every edge endpoint against every ray
        direction: two (len(dirs), n_edges) arrays."""
        iqx, iqy = iq
        u = np.array([(float(ux), float(uy)) for ux, uy in dirs])
        dax = self.fax - qx
        day = self.fay - qy
        dbx = self.fbx - qx
        dby = self.fby - qy
        out = []
        for dx, dy, verts in ((dax, day, self.ea), (dbx, dby, self.eb)):
            t1 = u[:, 0:1] * dy[None, :]
            t2 = u[:, 1:2] * dx[None, :]
            m = t1 - t2
            unc = np.abs(m) <= _FILTER * (np.abs(t1) + np.abs(t2))
            sgn = np.sign(m).astype(np.int8)
            if unc.any():
                for r, i in zip(*np.nonzero(unc)):
                    iux, iuy = dirs[r]
                    v = verts[i]
                    sgn[r, i] = _sign(iux * (self.vy[v] - iqy)
                                      - iuy * (self.vx[v] - iqx))
            out.append(sgn)
        return out[0], out[1]

    def _edge_orient_of(self, wx, wy, iw):
        """Exact sign of orient(a, b, w) for every edge."""
        iwx, iwy = iw
        exf = self.fbx - self.fax
        eyf = self.fby - self.fay
        t1 = exf * (wy - self.fay)
        t2 = eyf * (wx - self.fax)
        s = t1 - t2
        unc = np.abs(s) <= _FILTER * (np.abs(t1) + np.abs(t2))
        s = np.sign(s).astype(np.int64)
        if unc.any():
            for i in np.nonzero(unc)[0]:
                a = self.ea[i]
                b = self.eb[i]
                s[i] = _sign((self.vx[b] - self.vx[a]) * (iwy - self.vy[a])
                             - (self.vy[b] - self.vy[a]) * (iwx - self.vx[a]))
        return s

    # -- membership --------------------------------------------------------

    def contains(self, q: Point) -> int:
        """1 strictly inside, 0 on the boundary, -1 outside (exact)."""
        qx, qy = q.x, q.y
        iq = self.lift(qx, qy)
        s = self._edge_orient_of(qx, qy, iq)
        on = (s == 0) & (np.minimum(self.fax, self.fbx) <= qx) \
            & (qx <= np.maximum(self.fax, self.fbx)) \
            & (np.minimum(self.fay, self.fby) <= qy) \
            & (qy <= np.maximum(self.fay, self.fby))
        if on.any():
            return 0
        straddle = (self.fay > qy) != (self.fby > qy)
        upward = self.fby > self.fay
        crossing = straddle & ((upward & (s > 0)) | (~upward & (s < 0)))
        return 1 if (int(np.count_nonzero(crossing)) % 2 == 1) else -1

    def _contains_rational(self, rx: Rational, ry: Rational) -> int:
        """Membership for an exact rational point in scaled units.

        Bulk float evaluation against every edge with conservative bounds;
        only near-tie rows fall back to exact integer arithmetic.
        """
        fxu = _unscale(rx, self.one)
        fyu = _unscale(ry, self.one)
        exf = self.fbx - self.fax
        eyf = self.fby - self.fay
        t1 = exf * (fyu - self.fay)
        t2 = eyf * (fxu - self.fax)
        cr = t1 - t2
        # the bound also absorbs the rational -> float conversion error,
        # which is ulp-relative to the same magnitudes
        unc = np.abs(cr) <= 2.0 ** -40 * (np.abs(t1) + np.abs(t2))
        s = np.sign(cr).astype(np.int64)
        # straddle comparisons must be exact; escalate rows with y ties
        gap_a = self.fay - fyu
        gap_b = self.fby - fyu
        tie = (np.abs(gap_a) <= 2.0 ** -40 * (np.abs(self.fay) + abs(fyu))) \
            | (np.abs(gap_b) <= 2.0 ** -40 * (np.abs(self.fby) + abs(fyu)))
        ya_gt = gap_a > 0
        yb_gt = gap_b > 0
        escalate = unc | tie
        if escalate.any():
            rxn = rx.num
            rxd = rx.den
            ryn = ry.num
            ryd = ry.den
            for i in np.nonzero(escalate)[0]:
                a = self.ea[i]
                b = self.eb[i]
                ax = self.vx[a]
                ay = self.vy[a]
                bx = self.vx[b]
                by = self.vy[b]
                si = _sign((bx - ax) * (ryn - ay * ryd) * rxd
                           - (by - ay) * (rxn - ax * rxd) * ryd)
                s[i] = si
                if si == 0:
                    if (min(ax, bx) * rxd <= rxn <= max(ax, bx) * rxd
                            and min(ay, by) * ryd <= ryn
                            <= max(ay, by) * ryd):
                        return 0
                ya_gt[i] = ay * ryd > ryn
                yb_gt[i] = by * ryd > ryn
        straddle = ya_gt != yb_gt
        upward = self.fby > self.fay
        crossing = straddle & ((upward & (s > 0)) | (~upward & (s < 0)))
        return 1 if (int(np.count_nonzero(crossing)) % 2 == 1) else -1

    # -- ray walking -------------------------------------------------------

    def _ray_events_from_rows(self, iq, iu, sa_row, sb_row):
        """Boundary meetings along the open ray q + t*u, t > 0, as
        (T, kind, index) with T an exact increasing parameter (t scaled by
        |u|^2), kind "cross" for transversal crossings, "touch" otherwise.
        sa/sb are precomputed exact side signs per edge endpoint."""
        iqx, iqy = iq
        iux, iuy = iu
        d2 = iux * iux + iuy * iuy
        events = []
        touched = set()
        for i in range(self.n_edges):
            si = sa_row[i]
            ti = sb_row[i]
            if si == 0 or ti == 0:
                for v, sv in ((self.ea[i], si), (self.eb[i], ti)):
                    if sv == 0:
                        key = (self.vx[v], self.vy[v])
                        if key in touched:
                            continue
                        touched.add(key)
                        t_dot = (iux * (self.vx[v] - iqx)
                                 + iuy * (self.vy[v] - iqy))
                        if t_dot > 0:
                            events.append((Rational(t_dot, 1), "touch", v))
                continue
            if si == ti:
                continue
            a = self.ea[i]
            b = self.eb[i]
            ex = self.vx[b] - self.vx[a]
            ey = self.vy[b] - self.vy[a]
            den = iux * ey - iuy * ex
            num = (self.vx[a] - iqx) * ey - (self.vy[a] - iqy) * ex
            tval = Rational(num * d2, den)
            if tval.num > 0:
                events.append((tval, "cross", i))
        events.sort(key=lambda e: e[0])
        return events

    # -- interior direction cones -------------------------------------------

    def _vertex_cones(self, key):
        """Interior direction wedges at a boundary coordinate, as integer
        (start, end) direction pairs (ccw from start to end)."""
        cones = self._cone_cache.get(key)
        if cones is not None:
            return cones
        cones = []
        for base, n in self._spans:
            for i in range(n):
                v = base + i
                if (self.vx[v], self.vy[v]) != key:
                    continue
                p = base + (i - 1) % n
                nx = base + (i + 1) % n
                cones.append(((self.vx[nx] - self.vx[v],
                               self.vy[nx] - self.vy[v]),
                              (self.vx[p] - self.vx[v],
                               self.vy[p] - self.vy[v])))
        self._cone_cache[key] = cones
        return cones

    def _seed_cones(self, iq):
        """Interior cones at the seed: None when strictly inside, a cone
        list when on the boundary (vertex or edge interior)."""
        iqx, iqy = iq
        key = (iqx, iqy)
        vertex_cones = self._vertex_cones(key)
        if vertex_cones:
            return vertex_cones
        for i in range(self.n_edges):
            a = self.ea[i]
            b = self.eb[i]
            ax = self.vx[a]
            ay = self.vy[a]
            bx = self.vx[b]
            by = self.vy[b]
            cr = (bx - ax) * (iqy - ay) - (by - ay) * (iqx - ax)
            if cr != 0:
                continue
            if (min(ax, bx) <= iqx <= max(ax, bx)
                    and min(ay, by) <= iqy <= max(ay, by)):
                # interior lies left of the directed ring edge a -> b
                return [((bx - iqx, by - iqy), (ax - iqx, ay - iqy))]
        return None  # strictly interior

    @staticmethod
    def _dir_inside(cones, iu):
        """Is direction iu within any closed interior cone?"""
        ux, uy = iu
        for (sx, sy), (ex, ey) in cones:
            cse = sx * ey - sy * ex
            csu = sx * uy - sy * ux
            cue = ux * ey - uy * ex
            if cse > 0:
                if csu >= 0 and cue >= 0:
                    return True
            elif cse < 0:
                if csu >= 0 or cue >= 0:
                    return True
            else:
                # start and end parallel: opposite (half-plane cone) or a
                # degenerate spike
                if sx * ex + sy * ey < 0:
                    if csu >= 0:
                        return True
                elif csu == 0 and sx * ux + sy * uy > 0:
                    return True
        return False

    def _ray_end_rows(self, iq, iu, sa_row, sb_row, cones):
        """First exact parameter where visibility along the ray stops.

        Returns (T, point, edge_or_none); T == 0 means the ray leaves the
        environment immediately (boundary seed heading outside).  Grazing
        touches pass when the onward direction stays within the touched
        vertex's interior cones.
        """
        if cones is not None and not self._dir_inside(cones, iu):
            zero = Rational(0, 1)
            return zero, (Rational(iq[0], 1), Rational(iq[1], 1)), None
        iux, iuy = iu
        d2 = iux * iux + iuy * iuy
        events = self._ray_events_from_rows(iq, iu, sa_row, sb_row)
        k = 0
        n = len(events)
        while k < n:
            tcur, kind, ref = events[k]
            if kind == "cross":
                return tcur, self._ray_point(iq, iu, d2, tcur), ref
            # grazing touch: continue only into an interior cone of the
            # touched coordinate
            key = (self.vx[ref], self.vy[ref])
            if not self._dir_inside(self._vertex_cones(key), iu):
                return tcur, self._ray_point(iq, iu, d2, tcur), None
            k += 1
        raise OracleError("ray escaped a bounded environment")

    def _ray_end(self, qx, qy, iq, iu, q_strictly_inside: bool):
        """Single-ray convenience wrapper over the row-driven walk."""
        sa, sb = self._edge_side_of_ray(qx, qy, float(iu[0]), float(iu[1]),
                                        iq, iu)
        cones = None if q_strictly_inside else self._seed_cones(iq)
        return self._ray_end_rows(iq, iu, sa, sb, cones)

    def _point_outside(self, iq, iu, d2, t: Rational) -> bool:
        rx, ry = self._ray_point(iq, iu, d2, t)
        return self._contains_rational(rx, ry) < 0

    def _ray_point(self, iq, iu, d2, t: Rational):
        den = t.den * d2
        return (Rational(iq[0] * den + t.num * iu[0], den),
                Rational(iq[1] * den + t.num * iu[1], den))

    def _to_point(self, r) -> Point:
        rx, ry = r
        return Point(_unscale(rx, self.one), _unscale(ry, self.one))

    # -- queries -----------------------------------------------------------

    def segment_visible(self, q: Point, p: Point) -> bool:
        """Exact decision of segment q-p lying entirely within the closed
        environment."""
        cq = self.contains(q)
        if cq < 0:
            return False
        cp = self.contains(p)
        if cp < 0:
            return False
        if q.x == p.x and q.y == p.y:
            return True
        iq = self.lift(q.x, q.y)
        ip = self.lift(p.x, p.y)
        iu = (ip[0] - iq[0], ip[1] - iq[1])
        sa, sb = self._edge_side_of_ray(q.x, q.y, p.x - q.x, p.y - q.y,
                                        iq, iu)
        sq = self._edge_orient_of(q.x, q.y, iq)
        sp = self._edge_orient_of(p.x, p.y, ip)
        if ((sa * sb < 0) & (sq * sp < 0)).any():
            return False  # a transversal crossing blocks the segment
        if cq > 0 and cp > 0 and not ((sa == 0) | (sb == 0)).any():
            return True  # interior endpoints, no touches anywhere
        d2 = iu[0] * iu[0] + iu[1] * iu[1]
        params = {0, d2}
        for i in np.nonzero((sa == 0) | (sb == 0))[0]:
            for v, sv in ((self.ea[i], sa[i]), (self.eb[i], sb[i])):
                if sv == 0:
                    t = (iu[0] * (self.vx[v] - iq[0])
                         + iu[1] * (self.vy[v] - iq[1]))
                    if 0 < t < d2:
                        params.add(t)
        ordered = sorted(params)
        for t0, t1 in zip(ordered, ordered[1:]):
            mid = Rational(t0 + t1, 2)
            if self._point_outside(iq, iu, d2, mid):
                return False
        return True

    def visibility_polygon(self, q: Point):
        """Exact visibility polygon about q as a ccw vertex list, or None
        when q lies outside the environment.  Antenna spikes are
        preserved."""
        status = self.contains(q)
        if status < 0:
            return None
        qx, qy = q.x, q.y
        iq = self.lift(qx, qy)
        strictly_inside = status > 0

        # unique exact directions towards environment vertices
        dirs: dict[tuple[int, int], tuple[int, int]] = {}
        seen_coords = set()
        for v in range(len(self.vx)):
            key = (self.vx[v], self.vy[v])
            if key in seen_coords:
                continue
            seen_coords.add(key)
            dx = self.vx[v] - iq[0]
            dy = self.vy[v] - iq[1]
            if dx == 0 and dy == 0:
                continue
            g = math.gcd(abs(dx), abs(dy))
            dirs.setdefault((dx // g, dy // g), (dx, dy))

        def half(d):
            return 0 if (d[1] > 0 or (d[1] == 0 and d[0] > 0)) else 1

        def cmp(d1, d2):
            h1 = half(d1)
            h2 = half(d2)
            if h1 != h2:
                return -1 if h1 < h2 else 1
            c = d1[0] * d2[1] - d1[1] * d2[0]
            return -1 if c > 0 else (1 if c < 0 else 0)

        order = sorted(dirs.keys(), key=cmp_to_key(cmp))
        m = len(order)
        if m == 0:
            return None
        cones = None if strictly_inside else self._seed_cones(iq)

        dir_vecs = [dirs[d] for d in order]
        sa_ev, sb_ev = self._edge_side_matrix(qx, qy, iq, dir_vecs)
        f_pts = []
        for r in range(m):
            _, pt, _ = self._ray_end_rows(iq, dir_vecs[r], sa_ev[r],
                                          sb_ev[r], cones)
            f_pts.append(pt)

        # visible edge portion inside each angular interval
        probes = []
        probe_of = {}
        for i in range(m):
            j = (i + 1) % m
            di = dirs[order[i]]
            dj = dirs[order[j]]
            cr = di[0] * dj[1] - di[1] * dj[0]
            if cr <= 0:
                # a gap of half a turn or more is a blocked cone; only a
                # boundary seed can produce one
                if strictly_inside:
                    raise OracleError("empty angular interval at an "
                                      "interior seed")
                continue
            probe_of[i] = len(probes)
            probes.append((di[0] * _mag(dj) + dj[0] * _mag(di),
                           di[1] * _mag(dj) + dj[1] * _mag(di)))
        enters = [None] * m
        exits = [None] * m
        if probes:
            sa_pr, sb_pr = self._edge_side_matrix(qx, qy, iq, probes)
            for i, r in probe_of.items():
                j = (i + 1) % m
                t_end, _, edge = self._ray_end_rows(iq, probes[r], sa_pr[r],
                                                    sb_pr[r], cones)
                if t_end.num == 0:
                    continue  # blocked cone at a boundary seed
                if edge is None:
                    raise OracleError("interval probe ended on a vertex")
                enters[i] = self._ray_edge_point(iq, dirs[order[i]], edge)
                exits[j] = self._ray_edge_point(iq, dirs[order[j]], edge)

        out: list[Point] = []
        iq_rational = (Rational(iq[0], 1), Rational(iq[1], 1))
        for i in range(m):
            chunk = []
            if exits[i] is not None:
                chunk.append(exits[i])
            elif not strictly_inside:
                chunk.append(iq_rational)
            chunk.append(f_pts[i])
            if enters[i] is not None:
                chunk.append(enters[i])
            elif not strictly_inside:
                chunk.append(iq_rational)
            for r in chunk:
                p = self._to_point(r)
                if not out or out[-1] != p:
                    out.append(p)
        while len(out) > 1 and out[0] == out[-1]:
            out.pop()
        return out

    def _ray_edge_point(self, iq, iu, edge):
        """Exact intersection of ray (q, u) with the edge's supporting
        line."""
        a = self.ea[edge]
        b = self.eb[edge]
        ex = self.vx[b] - self.vx[a]
        ey = self.vy[b] - self.vy[a]
        den = iu[0] * ey - iu[1] * ex
        num = (self.vx[a] - iq[0]) * ey - (self.vy[a] - iq[1]) * ex
        return (Rational(iq[0] * den + num * iu[0], den),
                Rational(iq[1] * den + num * iu[1], den))

    def visible_vertices(self, q: Point) -> set[int]:
        """Indices (env.vertices order) of vertices visible from q."""
        return {v for v, p in enumerate(self.vert_points)
                if self.segment_visible(q, p)}

    def graph_edges(self, sites: list[Point]) -> set[frozenset]:
        """All mutually visible pairs among the given sites."""
        out = set()
        for i in range(len(sites)):
            for j in range(i + 1, len(sites)):
                if self.segment_visible(sites[i], sites[j]):
                    out.add(frozenset((i, j)))
        return out


def _mag(d):
    return max(abs(d[0]), abs(d[1]))


def _lift_one(x: float, one: int) -> int:
    m, e = math.frexp(x)
    mi = int(m * 9007199254740992.0)
    shift = (one.bit_length() - 1) - 53 + e
    if shift >= 0:
        return mi << shift
    if mi % (1 << -shift):
        raise ValueError(f"coordinate {x} is finer than the oracle scale")
    return mi >> -shift


def _unscale(r: Rational, one: int) -> float:
    return float(Rational(r.num, r.den * one))


def segment_visible(env: PolygonalEnvironment, q: Point, p: Point) -> bool:
    return Oracle(env).segment_visible(q, p)


def visibility_polygon(env: PolygonalEnvironment, q: Point):
    return Oracle(env).visibility_polygon(q)


def visible_vertices(env: PolygonalEnvironment, q: Point) -> set[int]:
    return Oracle(env).visible_vertices(q)


def graph_edges(env: PolygonalEnvironment, sites) -> set[frozenset]:
    return Oracle(env).graph_edges(list(sites))

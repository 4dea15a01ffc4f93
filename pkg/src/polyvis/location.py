"""Bucketed point location: exact pass, escalating relaxed retries, and
vertex snapping.

The bounding box is divided into square cells, each storing every triangle
it intersects (conservatively, so spurious cell entries are harmless and
missing ones impossible).  A query rounds its coordinates to a cell and
runs the exact point-in-triangle test over the cell's triangles; each
edge test is a precomputed linear form under a floating-point filter that
escalates to the exact predicates only near ties.  The relaxed epsilon
ladder over the 3x3 neighborhood only runs when some home-cell triangle
missed by no more than the largest epsilon, which keeps clear rejections
at exact-pass cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .environment import DEFAULT_EPSILONS, EpsilonConfig
from .geometry import GeometryError, Point
from .mesh import TriMesh
from .predicates import orientation

_FILTER = 2.0 ** -40  # covers rounding of the precomputed edge coefficients


class Coincidence(Enum):
    INTERIOR = "interior"
    ON_EDGE = "on_edge"
    ON_VERTEX = "on_vertex"


@dataclass(frozen=True)
class PointLocation:
    triangle: int
    coincidence: Coincidence
    edge: int | None = None          # set for ON_EDGE
    vertex: int | None = None        # set for ON_VERTEX
    snapped_vertex: int | None = None
    eps1_used: float | None = None


class BucketGrid:
    """Uniform square-cell index over the mesh bounding box.

    Registrations live in a compact slice table (cell key -> span of
    triangle ids); per-cell candidate records (triangle id, edge linear
    forms with filter constants, inverse edge lengths, corner coordinates)
    are materialized on first access and cached.
    """

    def __init__(self, origin: Point, cell_size: float, cols: int, rows: int):
        self.origin = origin
        self.cell_size = cell_size
        self.cols = cols
        self.rows = rows
        self._inv_cell = 1.0 / cell_size
        self._spans: dict[int, tuple] = {}   # key -> (start, end)
        self._reg_tris: list[int] = []
        self._records: list[tuple] = []
        self._cache: dict[int, tuple] = {}

    def cell_index(self, x: float, y: float):
        """Cell of a point; coordinates exactly on a cell boundary fall to
        the larger index (floor of the scaled offset), clamped to the
        grid.  None when outside."""
        cx = math.floor((x - self.origin.x) / self.cell_size)
        cy = math.floor((y - self.origin.y) / self.cell_size)
        if cx == self.cols and x <= self.origin.x + self.cols * self.cell_size:
            cx -= 1
        if cy == self.rows and y <= self.origin.y + self.rows * self.cell_size:
            cy -= 1
        if cx < 0 or cy < 0 or cx >= self.cols or cy >= self.rows:
            return None
        return cy * self.cols + cx

    def cell_records(self, key: int) -> tuple:
        recs = self._cache.get(key)
        if recs is None:
            span = self._spans.get(key)
            if span is None:
                recs = ()
            else:
                records = self._records
                recs = tuple(records[t]
                             for t in self._reg_tris[span[0]:span[1]])
            self._cache[key] = recs
        return recs

    def triangles_in_cell(self, idx: int):
        return [rec[0] for rec in self.cell_records(idx)]


def _candidate_record(t, ax, ay, bx, by, cx, cy):
    """Precompute, per edge (p -> r), the linear form A*x + B*y + C whose
    sign matches orient(p, r, q), a conservative filter constant, and the
    inverse edge length for signed distances."""
    rec = [t]
    forms = []
    for pxx, pyy, rx, ry in ((ax, ay, bx, by), (bx, by, cx, cy),
                             (cx, cy, ax, ay)):
        ex = rx - pxx
        ey = ry - pyy
        a = -ey
        b = ex
        c1 = ey * pxx
        c2 = ex * pyy
        c = c1 - c2
        k = _FILTER * (abs(a) + abs(b) + abs(c1) + abs(c2))
        forms.append((a, b, c, k))
        rec.append(1.0 / math.hypot(ex, ey))
    for f in forms:
        rec.extend(f)
    rec.extend((ax, ay, bx, by, cx, cy))
    return tuple(rec)


# record layout:
#  0: triangle id; 1..3: inverse edge lengths;
#  4..7 / 8..11 / 12..15: (A, B, C, K) per edge; 16..21: corner coords


def build_buckets(mesh: TriMesh, cell_size: float = 1.0) -> BucketGrid:
    """Index the mesh triangles into square buckets of the given size.

    Rasterization is conservative (rows and columns are padded beyond the
    largest location epsilon) and vectorized: triangle/row pairs are
    expanded into flat arrays, the per-row x-extent of each triangle is
    clipped in bulk, and only the final grouping touches Python objects.
    """
    if not cell_size > 0.0:
        raise GeometryError(f"cell_size must be positive, got {cell_size}")
    import numpy as np

    xs = mesh.px
    ys = mesh.py
    minx, maxx = min(xs), max(xs)
    miny, maxy = min(ys), max(ys)
    cols = max(1, math.ceil((maxx - minx) / cell_size))
    rows = max(1, math.ceil((maxy - miny) / cell_size))
    if minx + cols * cell_size < maxx:
        cols += 1
    if miny + rows * cell_size < maxy:
        rows += 1
    origin = Point(minx, miny)
    grid = BucketGrid(origin, cell_size, cols, rows)

    # registration slack must exceed the largest location epsilon so that a
    # triangle within epsilon of a query point always shares its cell
    pad = 1e-9 * cell_size + 4e-9

    tv = np.array(mesh.tri_verts, dtype=np.int64)
    pxa = np.array(xs)
    pya = np.array(ys)
    corner_x = pxa[tv]  # (T, 3)
    corner_y = pya[tv]

    records = [None] * len(mesh.tri_verts)
    for t, (a, b, c) in enumerate(mesh.tri_verts):
        records[t] = _candidate_record(t, xs[a], ys[a], xs[b], ys[b],
                                       xs[c], ys[c])

    row0 = np.maximum(
        0, np.floor((corner_y.min(axis=1) - pad - miny) / cell_size)
    ).astype(np.int64)
    row1 = np.minimum(
        rows - 1, np.floor((corner_y.max(axis=1) + pad - miny) / cell_size)
    ).astype(np.int64)
    nrows = np.maximum(0, row1 - row0 + 1)
    total = int(nrows.sum())
    tri_of = np.repeat(np.arange(len(records)), nrows)
    offsets = np.arange(total) - np.repeat(np.cumsum(nrows) - nrows, nrows)
    row_of = row0[tri_of] + offsets
    band_y0 = miny + row_of * cell_size - pad
    band_y1 = band_y0 + cell_size + 2 * pad

    xlo = np.full(total, np.inf)
    xhi = np.full(total, -np.inf)
    for e in range(3):
        ex0 = corner_x[:, e][tri_of]
        ey0 = corner_y[:, e][tri_of]
        ex1 = corner_x[:, (e + 1) % 3][tri_of]
        ey1 = corner_y[:, (e + 1) % 3][tri_of]
        swap = ey0 > ey1
        lo_x = np.where(swap, ex1, ex0)
        lo_y = np.where(swap, ey1, ey0)
        hi_x = np.where(swap, ex0, ex1)
        hi_y = np.where(swap, ey0, ey1)
        valid = (hi_y >= band_y0) & (lo_y <= band_y1)
        dy = hi_y - lo_y
        with np.errstate(divide="ignore", invalid="ignore"):
            t_lo = np.where(lo_y >= band_y0, 0.0, (band_y0 - lo_y) / dy)
            t_hi = np.where(hi_y <= band_y1, 1.0, (band_y1 - lo_y) / dy)
        t_lo = np.clip(np.nan_to_num(t_lo, nan=0.0), 0.0, 1.0)
        t_hi = np.clip(np.nan_to_num(t_hi, nan=1.0), 0.0, 1.0)
        xa = lo_x + t_lo * (hi_x - lo_x)
        xb = lo_x + t_hi * (hi_x - lo_x)
        e_lo = np.minimum(xa, xb)
        e_hi = np.maximum(xa, xb)
        np.minimum(xlo, np.where(valid, e_lo, np.inf), out=xlo)
        np.maximum(xhi, np.where(valid, e_hi, -np.inf), out=xhi)

    has_span = xlo <= xhi
    col0 = np.maximum(
        0, np.floor((xlo - pad - minx) / cell_size,
                    where=has_span, out=np.zeros(total))
    ).astype(np.int64)
    col1 = np.minimum(
        cols - 1, np.floor((xhi + pad - minx) / cell_size,
                           where=has_span, out=np.zeros(total))
    ).astype(np.int64)
    ncols = np.where(has_span, np.maximum(0, col1 - col0 + 1), 0)
    regs = int(ncols.sum())
    reg_entry = np.repeat(np.arange(total), ncols)
    col_off = np.arange(regs) - np.repeat(np.cumsum(ncols) - ncols, ncols)
    keys = (row_of[reg_entry] * cols + col0[reg_entry] + col_off)
    reg_tri = tri_of[reg_entry]

    if regs == 0:
        grid._records = records
        return grid
    order = np.argsort(keys, kind="stable")
    sorted_keys = keys[order]
    starts = np.nonzero(np.diff(sorted_keys, prepend=sorted_keys[:1] - 1))[0]
    ends = np.append(starts[1:], len(sorted_keys))
    grid._spans = dict(zip(sorted_keys[starts].tolist(),
                           zip(starts.tolist(), ends.tolist())))
    grid._reg_tris = reg_tri[order].tolist()
    grid._records = records
    return grid


def _exact_sign(rec, edge, qx, qy):
    base = 16 + 2 * edge
    pxx = rec[base]
    pyy = rec[base + 1]
    if edge == 2:
        rx = rec[16]
        ry = rec[17]
    else:
        rx = rec[base + 2]
        ry = rec[base + 3]
    return orientation(pxx, pyy, rx, ry, qx, qy)


def locate(grid: BucketGrid, mesh: TriMesh, q: Point,
           cfg: EpsilonConfig = DEFAULT_EPSILONS) -> PointLocation | None:
    """Find the triangle containing q.

    The exact pass scans only q's bucket.  When it rejects, each relaxed
    epsilon in cfg.eps1_sequence retries over the bucket and its eight
    neighbors, accepting a triangle missed by at most that signed
    perpendicular distance.  None means q lies outside the environment
    beyond every epsilon.  The found triangle is classified (interior /
    on-edge / on-vertex) and the nearest of its vertices within cfg.eps2
    becomes the snap target.
    """
    qx = q.x
    qy = q.y
    eps_seq = cfg.eps1_sequence
    max_eps = eps_seq[-1] if eps_seq else 0.0
    near_thresh = -(max_eps * 1.01 + 1e-12)

    origin = grid.origin
    inv = grid._inv_cell
    fx = (qx - origin.x) * inv
    fy = (qy - origin.y) * inv
    cols = grid.cols
    rows = grid.rows
    if fx < 0.0 or fy < 0.0 or fx >= cols or fy >= rows:
        # boundary-exact and slightly-outside coordinates take the slow path
        cx = math.floor(fx)
        cy = math.floor(fy)
        if cx == cols and fx <= cols:
            cx -= 1
        if cy == rows and fy <= rows:
            cy -= 1
        if 0 <= cx < cols and 0 <= cy < rows:
            pass  # clamped onto the grid; continue with the exact pass below
        elif not (-max_eps * inv - 1e-9 <= fx <= cols + max_eps * inv + 1e-9
                  and -max_eps * inv - 1e-9 <= fy
                  <= rows + max_eps * inv + 1e-9):
            return None  # far outside the indexed box
        else:
            best, eps_used = _epsilon_ladder(grid, qx, qy, cx, cy, eps_seq)
            if best is None:
                return None
            return _classify(mesh, q, best, eps_used, cfg)
    else:
        cx = int(fx)
        cy = int(fy)

    best = None
    near_miss = False
    if True:
        s_filter = abs(qx) if abs(qx) > abs(qy) else abs(qy)
        if s_filter < 1.0:
            s_filter = 1.0
        span = grid._spans.get(cy * cols + cx)
        records = grid._records
        reg_tris = grid._reg_tris
        for ri in range(span[0], span[1]) if span is not None else ():
            rec = records[reg_tris[ri]]
            zero_mask = 0
            rejected = False
            base = 4
            for edge in (0, 1, 2):
                val = rec[base] * qx + rec[base + 1] * qy + rec[base + 2]
                bound = rec[base + 3] * s_filter
                if val > bound:
                    base += 4
                    continue
                if val < -bound:
                    if val * rec[1 + edge] > near_thresh:
                        near_miss = True
                    rejected = True
                    break
                s = _exact_sign(rec, edge, qx, qy)
                if s < 0:
                    near_miss = True
                    rejected = True
                    break
                if s == 0:
                    zero_mask |= 1 << edge
                base += 4
            if rejected:
                continue
            if zero_mask == 0:
                best = (rec[0], 0)
                break
            if best is None or rec[0] < best[0]:
                best = (rec[0], zero_mask)

    eps_used = None
    if best is None:
        if not near_miss:
            return None
        best, eps_used = _epsilon_ladder(grid, qx, qy, cx, cy, eps_seq)
        if best is None:
            return None

    return _classify(mesh, q, best, eps_used, cfg)


def _epsilon_ladder(grid: BucketGrid, qx, qy, cx, cy, eps_seq):
    """Relaxed containment over the 3x3 cell neighborhood.

    The accepting epsilon is the first one at least as large as the best
    candidate's worst signed edge distance; ties prefer the greatest such
    distance, then the smallest triangle id.
    """
    if not eps_seq:
        return None, None
    cols = grid.cols
    rows = grid.rows
    seen = set()
    best_key = None
    best = None
    for dy in (-1, 0, 1):
        ccy = cy + dy
        if ccy < 0 or ccy >= rows:
            continue
        for dx in (-1, 0, 1):
            ccx = cx + dx
            if ccx < 0 or ccx >= cols:
                continue
            for rec in grid.cell_records(ccy * cols + ccx):
                t = rec[0]
                if t in seen:
                    continue
                seen.add(t)
                worst = math.inf
                base = 4
                for edge in (0, 1, 2):
                    val = rec[base] * qx + rec[base + 1] * qy + rec[base + 2]
                    dist = val * rec[1 + edge]
                    if dist < worst:
                        worst = dist
                    base += 4
                key = (worst, -t)
                if worst >= -eps_seq[-1] and (best_key is None
                                              or key > best_key):
                    best_key = key
                    # nearest edge by absolute distance
                    dists = []
                    base = 4
                    for edge in (0, 1, 2):
                        val = (rec[base] * qx + rec[base + 1] * qy
                               + rec[base + 2])
                        dists.append(abs(val * rec[1 + edge]))
                        base += 4
                    nearest = min(range(3), key=lambda i: dists[i])
                    best = (t, ("edge", nearest))
    if best is None:
        return None, None
    worst = best_key[0]
    for eps in eps_seq:
        if worst >= -eps:
            return best, eps
    return None, None


def _classify(mesh: TriMesh, q: Point, best, eps_used, cfg: EpsilonConfig):
    tid, info = best
    tv = mesh.tri_verts[tid]
    if eps_used is not None:
        coincidence = Coincidence.ON_EDGE
        edge = mesh.tri_edges[tid][info[1]]
        vertex = None
    elif info == 0:
        coincidence = Coincidence.INTERIOR
        edge = None
        vertex = None
    else:
        zeros = [e for e in (0, 1, 2) if info & (1 << e)]
        if len(zeros) == 1:
            coincidence = Coincidence.ON_EDGE
            edge = mesh.tri_edges[tid][zeros[0]]
            vertex = None
        else:
            # two zero edge lines meet at their shared corner
            corner = (zeros[1] if zeros == [0, 1]
                      else (zeros[1] if zeros == [1, 2] else 0))
            coincidence = Coincidence.ON_VERTEX
            edge = None
            vertex = tv[corner]
    snapped = None
    best_d = None
    for v in tv:
        d = math.hypot(mesh.px[v] - q.x, mesh.py[v] - q.y)
        if d <= cfg.eps2 and (best_d is None or d < best_d):
            best_d = d
            snapped = v
    return PointLocation(triangle=tid, coincidence=coincidence, edge=edge,
                         vertex=vertex, snapped_vertex=snapped,
                         eps1_used=eps_used)

"""Differential evaluation harness: query point sets, behavior taxonomy,
and the supervised benchmark runner.

Six seeded point families probe an environment (uniform interior, uniform
bounding box, exact vertices, edge midpoints, and noisy variants of the
latter two).  Each query runs in a killable worker process under a
watchdog; the exact reference answer is computed in the parent and the
outcome lands in one of ten mutually exclusive behavior classes
(Crash, Inf, NoRef, Null, A0R1, A1R0, Same, Weak, Snap, Diff).
"""

from __future__ import annotations

import math
import multiprocessing
import random
import statistics
import time
from dataclasses import dataclass, field

from shapely import make_valid
from shapely.geometry import Polygon as _ShapelyPolygon

from .engine import to_radial, visibility_region
from .environment import (DEFAULT_EPSILONS, EpsilonConfig,
                          PolygonalEnvironment, validate_and_normalize)
from .geometry import GeometryError, Point
from .location import build_buckets, locate
from .mesh import TriMesh, triangulate
from .oracle import Oracle

SET_KINDS = ("In", "BB", "Ver", "NearV", "Mid", "NearM")
BEHAVIORS = ("Crash", "Inf", "NoRef", "Null", "A0R1", "A1R0", "Same",
             "Weak", "Snap", "Diff")

_NOISE_SIGMAS = tuple(10.0 ** -k for k in range(15, 0, -1))


@dataclass
class QuerySet:
    kind: str
    points: list[Point]
    seed: int
    provenance: list  # per point: source index / sigma, kind-dependent


@dataclass
class BehaviorRecord:
    behavior: str
    set_kind: str
    index: int
    point: Point
    t_locate_us: float = 0.0
    t_query_us: float = 0.0
    t_total_us: float = 0.0
    triangles_traversed: int = 0


@dataclass
class BenchSummary:
    impl: str
    init_us_mean: float
    init_us_std: float
    prep_us_mean: float
    prep_us_std: float
    query_us_mean: float
    query_us_std: float
    pl_percent: float
    counts: dict = field(default_factory=dict)
    map_name: str = "map" 


def _gauss(rng: random.Random) -> float:
    """Box-Muller normal variate from two uniform draws; explicit so the
    stream is reproducible byte-for-byte across platforms."""
    u1 = 1.0 - rng.random()
    u2 = rng.random()
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


def generate_query_sets(env: PolygonalEnvironment, mesh: TriMesh,
                        count: int = 1000, seed: int = 0
                        ) -> dict[str, QuerySet]:
    """The six standard query point families, deterministic per seed."""
    oracle = Oracle(env)
    minx, miny, maxx, maxy = env.bounding_box
    sets = {}

    rng = random.Random(f"{seed}:In")
    pts, prov = [], []
    while len(pts) < count:
        p = Point(rng.uniform(minx, maxx), rng.uniform(miny, maxy))
        if oracle.contains(p) > 0:
            pts.append(p)
            prov.append(None)
    sets["In"] = QuerySet("In", pts, seed, prov)

    rng = random.Random(f"{seed}:BB")
    pts = [Point(rng.uniform(minx, maxx), rng.uniform(miny, maxy))
           for _ in range(count)]
    sets["BB"] = QuerySet("BB", pts, seed, [None] * count)

    rng = random.Random(f"{seed}:Ver")
    verts = env.vertices
    idxs = [rng.randrange(len(verts)) for _ in range(count)]
    sets["Ver"] = QuerySet("Ver", [verts[i] for i in idxs], seed, idxs)

    rng = random.Random(f"{seed}:Mid")
    pts, prov = [], []
    n_edges = len(mesh.edges)
    for _ in range(count):
        eid = rng.randrange(n_edges)
        a, b = mesh.edges[eid].vertices
        pa = mesh.point(a)
        pb = mesh.point(b)
        pts.append(Point((pa.x + pb.x) / 2.0, (pa.y + pb.y) / 2.0))
        prov.append(eid)
    sets["Mid"] = QuerySet("Mid", pts, seed, prov)

    for base_kind, kind in (("Ver", "NearV"), ("Mid", "NearM")):
        rng = random.Random(f"{seed}:{kind}")
        base = sets[base_kind]
        pts, prov = [], []
        for i in range(count):
            src = base.points[i]
            sigma = _NOISE_SIGMAS[rng.randrange(len(_NOISE_SIGMAS))]
            pts.append(Point(src.x + _gauss(rng) * sigma,
                             src.y + _gauss(rng) * sigma))
            prov.append((base.provenance[i], sigma))
        sets[kind] = QuerySet(kind, pts, seed, prov)
    return sets


def collapse_spikes(points) -> list[Point]:
    """Remove zero-width out-and-back antenna wedges and duplicate points
    from a vertex cycle (the removed features have zero area)."""
    pts = [p for p in points]
    changed = True
    while changed and len(pts) > 2:
        changed = False
        out = []
        n = len(pts)
        for i in range(n):
            prev = out[-1] if out else pts[i - 1]
            cur = pts[i]
            if cur.x == prev.x and cur.y == prev.y:
                changed = True
                continue
            out.append(cur)
        pts = out
        n = len(pts)
        if n > 2:
            keep = []
            for i in range(n):
                a = pts[i - 1]
                b = pts[i]
                c = pts[(i + 1) % n]
                if a.x == c.x and a.y == c.y:
                    changed = True  # spike tip: a -> b -> a
                    continue
                keep.append(b)
            pts = keep
    return pts


def xor_area_same(poly_a, poly_b, map_area: float) -> bool:
    """True iff the symmetric difference of the two polygons has area at
    most 1e-9 times the map area.  Antenna spikes are collapsed first;
    other non-simple input is rejected."""
    return xor_area(poly_a, poly_b) <= 1e-9 * map_area


def xor_area(poly_a, poly_b) -> float:
    sa = _to_shapely(poly_a)
    sb = _to_shapely(poly_b)
    return sa.symmetric_difference(sb).area


def _to_shapely(points):
    pts = collapse_spikes(points)
    if len(pts) < 3:
        raise GeometryError("polygon collapses to fewer than 3 points")
    poly = _ShapelyPolygon([(p.x, p.y) for p in pts])
    if poly.is_valid:
        return poly
    fixed = make_valid(poly)
    shoelace = 0.0
    n = len(pts)
    for i in range(n):
        a = pts[i]
        b = pts[(i + 1) % n]
        shoelace += a.x * b.y - b.x * a.y
    shoelace = abs(shoelace) / 2.0
    if abs(fixed.area - shoelace) > 1e-9 * max(shoelace, 1.0):
        raise GeometryError("polygon is non-simple beyond antenna "
                            "degeneracies")
    return fixed


@dataclass
class ClassifyContext:
    map_area: float
    snapped: bool = False
    weakly_simple_query: bool = False
    ref_available: bool = True


def classify(out_a, out_ref, ctx: ClassifyContext) -> str:
    """Behavior of a finished query given both outputs.

    Precedence: NoRef, Null, presence mismatches, Same (xor-area), then
    the special cases Weak and Snap, else Diff.  Crash and Inf are
    assigned by the runner before outputs exist.
    """
    if not ctx.ref_available:
        return "NoRef"
    if out_a is None and out_ref is None:
        return "Null"
    if out_a is None:
        return "A0R1"
    if out_ref is None:
        return "A1R0"
    try:
        same = xor_area_same(out_a, out_ref, ctx.map_area)
    except GeometryError:
        same = False  # degenerate outputs that defeat comparison differ
    if same:
        return "Same"
    if ctx.weakly_simple_query:
        return "Weak"
    if ctx.snapped:
        return "Snap"
    return "Diff"


def weakly_simple_coordinates(env: PolygonalEnvironment) -> set:
    """Coordinates carrying more than one pair of incident boundary
    edges."""
    counts = env.vertex_multiplicity()
    return {key for key, n in counts.items() if n >= 2}


def detect_weakly_simple(env: PolygonalEnvironment, v: Point) -> bool:
    """True iff the geometric point v is a weakly simple vertex (at least
    two boundary-edge pairs are incident there)."""
    return (v.x, v.y) in weakly_simple_coordinates(env)


# ---------------------------------------------------------------------------
# supervised benchmark runner


def _region_polygon(mesh, grid, cfg, q):
    """The full region pipeline for one query; None when q is outside."""
    t0 = time.perf_counter_ns()
    loc = locate(grid, mesh, q, cfg)
    t1 = time.perf_counter_ns()
    if loc is None:
        return None, (t1 - t0) / 1e3, (t1 - t0) / 1e3, 0
    region, stats = visibility_region(mesh, loc, q)
    radial = to_radial(mesh, region)
    pts = [v.point for v in radial.vertices]
    t2 = time.perf_counter_ns()
    return (pts, (t1 - t0) / 1e3, (t2 - t0) / 1e3,
            stats.triangles_traversed)


def _bench_worker(conn, rings, sets_payload, cfg, stall_on, crash_on=None):
    t0 = time.perf_counter_ns()
    env = validate_and_normalize(rings)
    t1 = time.perf_counter_ns()
    mesh = triangulate(env)
    grid = build_buckets(mesh)
    t2 = time.perf_counter_ns()
    conn.send(("ready", (t1 - t0) / 1e3, (t2 - t1) / 1e3))
    for kind, idx, x, y in sets_payload:
        if stall_on is not None and (kind, idx) == tuple(stall_on):
            while True:  # injected stall for watchdog self-tests
                time.sleep(3600)
        if crash_on is not None and (kind, idx) == tuple(crash_on):
            raise RuntimeError("injected crash")
        q = Point(x, y)
        pts, t_loc, t_query, traversed = _region_polygon(mesh, grid, cfg, q)
        payload = None if pts is None else [(p.x, p.y) for p in pts]
        conn.send(("result", kind, idx, payload, t_loc, t_query, traversed))
    conn.send(("done",))
    conn.close()


def run_bench(env: PolygonalEnvironment, query_sets, watchdog_seconds=10.0,
              cfg: EpsilonConfig = DEFAULT_EPSILONS, map_name: str = "map",
              stall_on=None, crash_on=None, reference: str = "oracle"):
    """Run the visibility-polygon query for every point of every set in a
    supervised worker, classify each outcome against the exact reference,
    and aggregate timing.

    Returns (records, summary).  Exceeding the watchdog records Inf;
    abnormal worker termination records Crash; the run continues with a
    fresh worker either way.  stall_on=(kind, index) injects an artificial
    hang for self-tests.
    """
    oracle = Oracle(env) if reference == "oracle" else None
    weak_coords = weakly_simple_coordinates(env)
    vert_coords = {(p.x, p.y) for p in env.vertices}
    map_area = abs(env.area)
    mesh = triangulate(env)
    grid = build_buckets(mesh)

    queue = []
    for kind in SET_KINDS:
        if kind not in query_sets:
            continue
        qs = query_sets[kind]
        for idx, p in enumerate(qs.points):
            queue.append((kind, idx, p.x, p.y))

    rings = [[(p.x, p.y) for p in ring] for ring in env.rings]
    records: list[BehaviorRecord] = []
    init_times = []
    prep_times = []
    pos = 0
    ctx_mp = multiprocessing.get_context("fork")

    while pos < len(queue):
        parent, child = ctx_mp.Pipe()
        worker = ctx_mp.Process(target=_bench_worker,
                                args=(child, rings, queue[pos:], cfg,
                                      stall_on, crash_on), daemon=True)
        worker.start()
        child.close()
        alive = True
        if not parent.poll(max(watchdog_seconds * 10, 60.0)):
            alive = False
        else:
            try:
                msg = parent.recv()
                init_times.append(msg[1])
                prep_times.append(msg[2])
            except EOFError:
                alive = False
        while alive and pos < len(queue):
            kind, idx, x, y = queue[pos]
            got = None
            if parent.poll(watchdog_seconds):
                try:
                    got = parent.recv()
                except EOFError:
                    got = None
            if got is None or got[0] == "done":
                behavior = "Inf" if got is None else "Crash"
                if got is None and not worker.is_alive():
                    behavior = "Crash"
                records.append(BehaviorRecord(behavior, kind, idx,
                                              Point(x, y)))
                pos += 1
                alive = False
                break
            _, r_kind, r_idx, payload, t_loc, t_query, traversed = got
            q = Point(x, y)
            record = BehaviorRecord("", r_kind, r_idx, q, t_loc, t_query,
                                    t_query, traversed)
            out_a = (None if payload is None
                     else [Point(px, py) for px, py in payload])
            ref_ok = True
            out_ref = None
            if oracle is not None:
                try:
                    out_ref = oracle.visibility_polygon(q)
                except Exception:
                    ref_ok = False
            else:
                ref_ok = False
            snapped = False
            weak = (q.x, q.y) in weak_coords
            if (q.x, q.y) not in vert_coords:
                snap_loc = locate(grid, mesh, q, cfg)
                if snap_loc is not None and snap_loc.snapped_vertex is not None:
                    snapped = True
                    sp = mesh.point(snap_loc.snapped_vertex)
                    weak = weak or ((sp.x, sp.y) in weak_coords
                                    and (q.x, q.y) == (sp.x, sp.y))
            record.behavior = classify(
                out_a, out_ref,
                ClassifyContext(map_area=map_area, snapped=snapped,
                                weakly_simple_query=weak,
                                ref_available=ref_ok))
            records.append(record)
            pos += 1
        if worker.is_alive():
            worker.terminate()
        worker.join(5.0)

    finished = [r for r in records if r.behavior not in ("Crash", "Inf")]
    q_times = [r.t_query_us for r in finished] or [0.0]
    loc_times = [r.t_locate_us for r in finished] or [0.0]
    counts = {b: 0 for b in BEHAVIORS}
    for r in records:
        counts[r.behavior] += 1
    summary = BenchSummary(
        impl="triangular-expansion",
        init_us_mean=statistics.fmean(init_times or [0.0]),
        init_us_std=(statistics.pstdev(init_times)
                     if len(init_times) > 1 else 0.0),
        prep_us_mean=statistics.fmean(prep_times or [0.0]),
        prep_us_std=(statistics.pstdev(prep_times)
                     if len(prep_times) > 1 else 0.0),
        query_us_mean=statistics.fmean(q_times),
        query_us_std=statistics.pstdev(q_times) if len(q_times) > 1 else 0.0,
        pl_percent=(100.0 * sum(loc_times) / sum(q_times)
                    if sum(q_times) > 0 else 0.0),
        counts=counts)
    summary.map_name = map_name
    return records, summary


def write_report(records, path, map_name: str = "map"):
    """One CSV row per query."""
    with open(path, "w") as fh:
        fh.write("map,set_kind,point_index,x,y,behavior,t_locate_us,"
                 "t_query_us,triangles_traversed\n")
        for r in records:
            fh.write(f"{map_name},{r.set_kind},{r.index},{r.point.x!r},"
                     f"{r.point.y!r},{r.behavior},{r.t_locate_us:.3f},"
                     f"{r.t_query_us:.3f},{r.triangles_traversed}\n")


def write_summary(summary: BenchSummary, path):
    with open(path, "w") as fh:
        fh.write("impl,init_us_mean,init_us_std,prep_us_mean,prep_us_std,"
                 "query_us_mean,query_us_std,pl_percent\n")
        fh.write(f"{summary.impl},{summary.init_us_mean:.3f},"
                 f"{summary.init_us_std:.3f},{summary.prep_us_mean:.3f},"
                 f"{summary.prep_us_std:.3f},{summary.query_us_mean:.3f},"
                 f"{summary.query_us_std:.3f},{summary.pl_percent:.2f}\n")

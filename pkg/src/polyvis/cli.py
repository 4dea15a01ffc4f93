"""Command-line interface.

Subcommands: preprocess (build and report structure sizes), query (one
visibility query with JSON/SVG output), genpoints (write the six query
point sets), bench (differential benchmark against the exact reference),
selftest (engine-vs-reference equivalence on fresh interior points).

Exit codes: 0 success, 2 usage error, 3 map load failure, 4 query point
outside the environment, 5 internal error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
import time

from . import __version__
from .engine import (QueryStats, intersect_with_circle, sample_arc_edges,
                     shoot_ray, to_polygon, to_radial, two_point_visible,
                     visibility_region, visible_points, visible_vertices)
from .environment import DEFAULT_EPSILONS, EpsilonConfig
from .geometry import Direction, GeometryError, Point
from .graphs import build_full_graph, format_graph
from .harness import (generate_query_sets, run_bench, write_report,
                      write_summary, xor_area_same)
from .location import build_buckets, locate
from .mapio import MapFormatError, load_map, load_points, save_points
from .mesh import triangulate
from .oracle import Oracle
from .svg import render_svg

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_LOAD = 3
EXIT_OUTSIDE = 4
EXIT_INTERNAL = 5


def _parse_pair(text):
    try:
        a, b = text.split(",")
        return float(a), float(b)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected 'x,y', got {text!r}")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="polyvis",
        description="Visibility queries in polygonal environments")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--eps1", default=None,
                        help="comma-separated relaxed location epsilons "
                             "(default: 1e-18..1e-9 decades)")
    parser.add_argument("--eps2", type=float, default=1e-12,
                        help="vertex snapping radius (default 1e-12)")
    parser.add_argument("--bucket-size", type=float, default=1.0,
                        help="point-location cell size (default 1)")
    parser.add_argument("--arc-angle", type=float, default=math.pi / 180.0,
                        help="max arc sampling angle (default pi/180)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="build structures and report sizes")
    p.add_argument("map")

    p = sub.add_parser("query", help="run one visibility query")
    p.add_argument("map")
    p.add_argument("--type", required=True, dest="qtype",
                   choices=("region", "2pt", "ray", "vertices", "points",
                            "graph"))
    p.add_argument("--at", type=_parse_pair, required=True,
                   help="query point 'x,y'")
    p.add_argument("--to", type=_parse_pair, help="target point for 2pt")
    p.add_argument("--dir", type=_parse_pair, help="direction for ray")
    p.add_argument("--sites", help="POINTS file for points/graph queries")
    p.add_argument("--range", type=float, dest="range_d",
                   help="visibility range limit d")
    p.add_argument("--svg", help="write an SVG rendering here")
    p.add_argument("--json", action="store_true", help="emit JSON")

    p = sub.add_parser("genpoints", help="generate the six query point sets")
    p.add_argument("map")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("bench", help="differential benchmark vs the "
                                     "exact reference")
    p.add_argument("map")
    p.add_argument("--points", required=True,
                   help="directory of POINTS files from genpoints")
    p.add_argument("--watchdog", type=float, default=10.0)
    p.add_argument("--report", required=True, help="per-query CSV path")
    p.add_argument("--summary", help="summary CSV path")

    p = sub.add_parser("selftest", help="engine vs reference on fresh "
                                        "interior points")
    p.add_argument("map")
    p.add_argument("--queries", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _epsilons(args) -> EpsilonConfig:
    if args.eps1 is None:
        seq = DEFAULT_EPSILONS.eps1_sequence
    elif args.eps1.strip() == "":
        seq = ()
    else:
        seq = tuple(float(tok) for tok in args.eps1.split(","))
    return EpsilonConfig(eps1_sequence=seq, eps2=args.eps2)


def _stats_json(stats: QueryStats):
    return {"triangles_traversed": stats.triangles_traversed,
            "views_split": stats.views_split,
            "boundary_edges_hit": stats.boundary_edges_hit}


def _cmd_query(args, out) -> int:
    env = load_map(args.map)
    cfg = _epsilons(args)
    mesh = triangulate(env)
    grid = build_buckets(mesh, args.bucket_size)
    q = Point(*args.at)
    stats = QueryStats()
    loc = locate(grid, mesh, q, cfg)
    doc = {"query": {"type": args.qtype, "at": [q.x, q.y],
                     "range": args.range_d}}
    overlays = {"regions": [], "graphs": [], "points": [q], "rays": []}

    if loc is None:
        doc["result"] = None
        _emit(args, out, doc, env, overlays)
        return EXIT_OUTSIDE

    if args.qtype == "region":
        region, stats = visibility_region(mesh, loc, q, args.range_d)
        radial = to_radial(mesh, region)
        if args.range_d is not None:
            radial = intersect_with_circle(radial, args.range_d)
            overlays["regions"].append(radial)
            radial = sample_arc_edges(radial, args.arc_angle)
        else:
            overlays["regions"].append(radial)
        poly = to_polygon(radial)
        doc["result"] = {"kind": "region",
                         "polygon": [[p.x, p.y] for p in poly.vertices]}
    elif args.qtype == "2pt":
        if args.to is None:
            raise _Usage("--to is required for 2pt queries")
        p = Point(*args.to)
        visible = two_point_visible(mesh, loc, q, p, args.range_d,
                                    stats=stats)
        doc["result"] = {"kind": "bool", "visible": visible}
        overlays["points"].append(p)
        if visible:
            overlays["graphs"].append([(q, p)])
    elif args.qtype == "ray":
        if args.dir is None:
            raise _Usage("--dir is required for ray queries")
        u = Direction(*args.dir)
        hit = shoot_ray(mesh, loc, q, u, args.range_d, stats=stats)
        if hit is None:
            doc["result"] = None
        else:
            doc["result"] = {"kind": "point", "point": [hit.x, hit.y]}
            overlays["rays"].append((q, hit))
    elif args.qtype == "vertices":
        ids = visible_vertices(mesh, loc, q, d=args.range_d, stats=stats)
        ordered = sorted(ids)
        doc["result"] = {"kind": "ids", "vertices": ordered,
                         "coordinates": [[mesh.px[v], mesh.py[v]]
                                         for v in ordered]}
        overlays["graphs"].append(
            [(q, mesh.point(v)) for v in ordered])
    elif args.qtype == "points":
        if args.sites is None:
            raise _Usage("--sites is required for points queries")
        sites = load_points(args.sites)
        located = [(p, locate(grid, mesh, p, cfg)) for p in sites.points]
        vis, skipped = visible_points(mesh, loc, q, located, args.range_d,
                                      stats=stats)
        doc["result"] = {"kind": "ids", "sites": sorted(vis),
                         "skipped": skipped}
        overlays["points"].extend(sites.points)
        overlays["graphs"].append([(q, sites.points[i]) for i in sorted(vis)])
    else:  # graph
        vertex_ids = list(range(len(mesh.points)))
        located = []
        if args.sites is not None:
            sites = load_points(args.sites)
            located = [(p, locate(grid, mesh, p, cfg)) for p in sites.points]
        graph = build_full_graph(mesh, vertex_ids, located, args.range_d)
        doc["result"] = {"kind": "graph", "edges": format_graph(graph)}
        segs = []
        for tag, a, b in sorted(graph.edges):
            pa = (mesh.point(graph.vertex_sites[a]) if tag in ("VV", "VP")
                  else located[a][0])
            pb = (located[b][0] if tag in ("PP", "VP")
                  else mesh.point(graph.vertex_sites[b]))
            segs.append((pa, pb))
        overlays["graphs"].append(segs)

    doc["stats"] = _stats_json(stats)
    _emit(args, out, doc, env, overlays)
    return EXIT_OK


def _emit(args, out, doc, env, overlays):
    if args.svg:
        render_svg(env, args.svg, regions=overlays["regions"],
                   graphs=overlays["graphs"], points=overlays["points"],
                   rays=overlays["rays"])
    if args.json:
        out.write(json.dumps(doc, sort_keys=True) + "\n")
    else:
        result = doc.get("result")
        if result is None:
            out.write("result: null (query point outside the "
                      "environment or beyond range)\n")
        elif result["kind"] == "region":
            out.write(f"region polygon with {len(result['polygon'])} "
                      f"vertices\n")
        elif result["kind"] == "bool":
            out.write("visible\n" if result["visible"]
                      else "not visible\n")
        elif result["kind"] == "point":
            out.write(f"hit {result['point'][0]!r} "
                      f"{result['point'][1]!r}\n")
        elif result["kind"] == "graph":
            out.write(result["edges"])
        else:
            out.write(" ".join(str(i) for i in
                               result.get("vertices",
                                          result.get("sites", []))) + "\n")


class _Usage(Exception):
    pass


def _cmd_preprocess(args, out) -> int:
    env = load_map(args.map)
    t0 = time.perf_counter()
    mesh = triangulate(env)
    t1 = time.perf_counter()
    grid = build_buckets(mesh, args.bucket_size)
    t2 = time.perf_counter()
    for note in env.diagnostics:
        out.write(f"note: {note}\n")
    out.write(f"vertices: {len(env.vertices)}\n")
    out.write(f"holes: {len(env.holes)}\n")
    out.write(f"triangles: {len(mesh)}\n")
    out.write(f"edges: {len(mesh.edges)}\n")
    out.write(f"buckets: {grid.cols}x{grid.rows} "
              f"(cell {grid.cell_size!r})\n")
    out.write(f"triangulation: {1e3 * (t1 - t0):.1f} ms, "
              f"buckets: {1e3 * (t2 - t1):.1f} ms\n")
    return EXIT_OK


def _cmd_genpoints(args, out) -> int:
    env = load_map(args.map)
    mesh = triangulate(env)
    sets = generate_query_sets(env, mesh, count=args.count, seed=args.seed)
    os.makedirs(args.out, exist_ok=True)
    for kind, qs in sets.items():
        path = os.path.join(args.out, f"{kind}.points")
        save_points(qs, path)
        out.write(f"wrote {path} ({len(qs.points)} points)\n")
    return EXIT_OK


def _cmd_bench(args, out) -> int:
    env = load_map(args.map)
    sets = {}
    for name in sorted(os.listdir(args.points)):
        if name.endswith(".points"):
            qs = load_points(os.path.join(args.points, name))
            sets[qs.kind] = qs
    if not sets:
        raise _Usage(f"no .points files in {args.points}")
    records, summary = run_bench(env, sets, watchdog_seconds=args.watchdog,
                                 cfg=_epsilons(args),
                                 map_name=os.path.basename(args.map))
    write_report(records, args.report, os.path.basename(args.map))
    if args.summary:
        write_summary(summary, args.summary)
    for behavior, n in sorted(summary.counts.items()):
        if n:
            out.write(f"{behavior}: {n}\n")
    out.write(f"query mean {summary.query_us_mean:.1f} us "
              f"(PL {summary.pl_percent:.1f}%)\n")
    return EXIT_OK


def _cmd_selftest(args, out) -> int:
    env = load_map(args.map)
    cfg = _epsilons(args)
    mesh = triangulate(env)
    grid = build_buckets(mesh, args.bucket_size)
    oracle = Oracle(env)
    minx, miny, maxx, maxy = env.bounding_box
    rng = random.Random(args.seed)
    area = abs(env.area)
    checked = 0
    failures = 0
    while checked < args.queries:
        q = Point(rng.uniform(minx, maxx), rng.uniform(miny, maxy))
        if oracle.contains(q) <= 0:
            continue
        checked += 1
        loc = locate(grid, mesh, q, cfg)
        if loc is None:
            failures += 1
            out.write(f"FAIL locate {q.x!r},{q.y!r}\n")
            continue
        region, _ = visibility_region(mesh, loc, q)
        poly = to_polygon(to_radial(mesh, region))
        ref = oracle.visibility_polygon(q)
        if not xor_area_same(poly.vertices, ref, area):
            failures += 1
            out.write(f"FAIL region {q.x!r},{q.y!r}\n")
    out.write(f"selftest: {checked - failures}/{checked} matched the "
              f"reference\n")
    return EXIT_OK if failures == 0 else EXIT_INTERNAL


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    out = sys.stdout
    try:
        if args.command == "preprocess":
            return _cmd_preprocess(args, out)
        if args.command == "query":
            return _cmd_query(args, out)
        if args.command == "genpoints":
            return _cmd_genpoints(args, out)
        if args.command == "bench":
            return _cmd_bench(args, out)
        if args.command == "selftest":
            return _cmd_selftest(args, out)
        parser.error(f"unknown command {args.command!r}")
    except _Usage as exc:
        parser.exit(EXIT_USAGE, f"error: {exc}\n")
    except (MapFormatError, FileNotFoundError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_LOAD
    except GeometryError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INTERNAL
    return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

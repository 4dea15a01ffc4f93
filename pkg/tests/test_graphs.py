import random

import pytest

from polyvis.geometry import GeometryError, Point
from polyvis.graphs import (PP, VP, VV, build_full_graph, format_graph,
                            merge_graphs, point_point_graph,
                            vertex_point_graph, vertex_vertex_graph)
from polyvis.location import locate

from conftest import cached_map, interior_points


def test_k4_on_square(square_setup):
    _, mesh, _ = square_setup
    g = vertex_vertex_graph(mesh, range(4))
    assert g.edge_count() == 6
    assert all(tag == VV for tag, _, _ in g.edges)


def test_d_zero_graph_is_edgeless(square_setup):
    _, mesh, _ = square_setup
    g = vertex_vertex_graph(mesh, range(4), d=0.0)
    assert g.edge_count() == 0


def test_hole_vv_matches_oracle(hole_setup):
    from polyvis.oracle import Oracle
    env, mesh, _ = hole_setup
    oracle = Oracle(env)
    g = vertex_vertex_graph(mesh, range(len(mesh.points)))
    want = set()
    pts = mesh.points
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if oracle.segment_visible(pts[i], pts[j]):
                want.add((VV, i, j))
    assert g.edges == want


def test_point_point_examples(square_setup, hole_setup):
    _, mesh, grid = square_setup
    sites = [Point(1, 1), Point(9, 9), Point(1, 9)]
    located = [(p, locate(grid, mesh, p)) for p in sites]
    g = point_point_graph(mesh, located)
    assert g.edge_count() == 3  # K3

    _, mesh, grid = hole_setup
    located = [(p, locate(grid, mesh, p))
               for p in (Point(2, 5), Point(8, 5))]
    g = point_point_graph(mesh, located)
    assert g.edge_count() == 0


def test_unlocatable_sites_reported(hole_setup):
    _, mesh, grid = hole_setup
    located = [(Point(2, 5), locate(grid, mesh, Point(2, 5))),
               (Point(5, 5), locate(grid, mesh, Point(5, 5)))]
    g = point_point_graph(mesh, located)
    assert g.skipped_points == (1,)


def test_vertex_point_examples(square_setup, hole_setup):
    _, mesh, grid = square_setup
    located = [(Point(5, 5), locate(grid, mesh, Point(5, 5)))]
    g = vertex_point_graph(mesh, range(4), located)
    assert g.edge_count() == 4
    assert all(tag == VP for tag, _, _ in g.edges)

    env, mesh, grid = hole_setup
    hole_ids = [v for v in range(len(mesh.points))
                if 4 <= mesh.px[v] <= 6 and 4 <= mesh.py[v] <= 6]
    located = [(Point(2, 5), locate(grid, mesh, Point(2, 5)))]
    g = vertex_point_graph(mesh, hole_ids, located)
    seen = {(mesh.px[hole_ids[a]], mesh.py[hole_ids[a]])
            for _, a, _ in g.edges}
    assert seen == {(4.0, 4.0), (4.0, 6.0)}


def test_empty_point_set(square_setup):
    _, mesh, _ = square_setup
    g = vertex_point_graph(mesh, range(4), [])
    assert g.edge_count() == 0


def test_merge_counts(square_setup):
    _, mesh, grid = square_setup
    located = [(Point(5, 5), locate(grid, mesh, Point(5, 5)))]
    g_vv = vertex_vertex_graph(mesh, range(4))
    g_pp = point_point_graph(mesh, located)
    g_vp = vertex_point_graph(mesh, range(4), located)
    merged = merge_graphs(g_vv, g_pp, g_vp)
    assert merged.edge_count() == 6 + 0 + 4
    assert merged.edge_count(VV) == 6
    assert merged.edge_count(PP) == 0
    assert merged.edge_count(VP) == 4


def test_merge_rejects_mismatched_sites(square_setup):
    _, mesh, grid = square_setup
    located = [(Point(5, 5), locate(grid, mesh, Point(5, 5)))]
    g_vv = vertex_vertex_graph(mesh, range(3))
    g_pp = point_point_graph(mesh, located)
    g_vp = vertex_point_graph(mesh, range(4), located)
    with pytest.raises(GeometryError):
        merge_graphs(g_vv, g_pp, g_vp)


def test_rejects_point_site_on_vertex(square_setup):
    _, mesh, grid = square_setup
    located = [(Point(0, 0), locate(grid, mesh, Point(0, 0)))]
    with pytest.raises(GeometryError):
        vertex_point_graph(mesh, range(4), located)


@pytest.mark.parametrize("seed", [1, 4])
def test_merged_matches_oracle(seed):
    env, mesh, grid, oracle = cached_map(seed)
    rng = random.Random(31 + seed)
    vert_ids = sorted(rng.sample(range(len(mesh.points)),
                                 min(14, len(mesh.points))))
    pts = interior_points(oracle, env, rng, 10)
    located = [(p, locate(grid, mesh, p)) for p in pts]
    merged = build_full_graph(mesh, vert_ids, located)

    sites = [mesh.point(v) for v in vert_ids] + pts
    want_pairs = oracle.graph_edges(sites)
    nv = len(vert_ids)
    got_pairs = set()
    for tag, a, b in merged.edges:
        if tag == VV:
            got_pairs.add(frozenset((a, b)))
        elif tag == PP:
            got_pairs.add(frozenset((nv + a, nv + b)))
        else:
            got_pairs.add(frozenset((a, nv + b)))
    assert got_pairs == want_pairs
    assert merged.edge_count() == (merged.edge_count(VV)
                                   + merged.edge_count(PP)
                                   + merged.edge_count(VP))


def test_vv_symmetric_regardless_of_order(hole_setup):
    _, mesh, _ = hole_setup
    ids = list(range(len(mesh.points)))
    g1 = vertex_vertex_graph(mesh, ids)
    g2 = vertex_vertex_graph(mesh, list(reversed(ids)))
    remap = {i: len(ids) - 1 - i for i in range(len(ids))}
    flipped = {(VV, min(remap[a], remap[b]), max(remap[a], remap[b]))
               for _, a, b in g2.edges}
    assert g1.edges == flipped


def test_d_monotone_edge_sets(hole_setup):
    _, mesh, _ = hole_setup
    ids = list(range(len(mesh.points)))
    prev = set()
    for d in (3.0, 6.0, 12.0, None):
        g = vertex_vertex_graph(mesh, ids, d=d)
        assert prev <= g.edges
        prev = g.edges


def test_format_graph_deterministic(square_setup):
    _, mesh, grid = square_setup
    located = [(Point(5, 5), locate(grid, mesh, Point(5, 5)))]
    merged = build_full_graph(mesh, range(4), located)
    text1 = format_graph(merged)
    text2 = format_graph(merged)
    assert text1 == text2
    lines = text1.strip().split("\n")
    assert len(lines) == 10
    assert lines == sorted(lines, key=lambda ln: (
        {"VV": 0, "PP": 1, "VP": 2}[ln.split()[0]],
        int(ln.split()[1]), int(ln.split()[2])))

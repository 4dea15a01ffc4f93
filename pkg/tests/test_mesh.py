import math
import random

import pytest

from polyvis.environment import validate_and_normalize
from polyvis.geometry import Point, signed_area
from polyvis.mesh import (BOUNDARY, MeshError, ordered_fan, outer_fan_edges,
                          triangulate)

from conftest import cached_map, exact_incircle_fraction


@pytest.mark.parametrize("method", ["qhull", "incremental"])
def test_square_counts(square_env, method):
    mesh = triangulate(square_env, method=method)
    assert len(mesh) == 2             # n + 2h - 2 = 4 - 2
    assert len(mesh.edges) == 5
    assert sum(e.is_boundary for e in mesh.edges) == 4


@pytest.mark.parametrize("method", ["qhull", "incremental"])
def test_hole_map_counts(hole_env, method):
    mesh = triangulate(hole_env, method=method)
    assert len(mesh) == 8             # 8 + 2 - 2


def test_pentagon_is_delaunay():
    pent = [(math.cos(2 * math.pi * k / 5), math.sin(2 * math.pi * k / 5))
            for k in range(5)]
    env = validate_and_normalize([pent])
    mesh = triangulate(env)
    assert len(mesh) == 3
    _assert_delaunay(mesh)


def _assert_delaunay(mesh):
    # for every unconstrained interior edge, each opposite vertex must not
    # lie strictly inside the other triangle's circumcircle (independent
    # rational oracle)
    for edge in mesh.edges:
        if edge.is_boundary or len(edge.triangles) != 2:
            continue
        t1, t2 = edge.triangles
        a, b, c = (mesh.point(v) for v in mesh.tri_verts[t1])
        other = next(v for v in mesh.tri_verts[t2]
                     if v not in mesh.tri_verts[t1])
        d = mesh.point(other)
        assert exact_incircle_fraction(a.x, a.y, b.x, b.y, c.x, c.y,
                                       d.x, d.y) <= 0


@pytest.mark.parametrize("seed", [0, 1, 4, 6])
def test_random_maps_mesh_invariants(seed):
    env, mesh, _, _ = cached_map(seed)
    n_entries = sum(len(r) for r in env.rings)
    assert len(mesh) == n_entries + 2 * len(env.holes) - 2

    # triangles tile the environment: area identity
    tri_area = math.fsum(signed_area(mesh.triangle_points(t))
                         for t in range(len(mesh)))
    assert tri_area == pytest.approx(env.area, rel=1e-12)
    assert all(signed_area(mesh.triangle_points(t)) > 0
               for t in range(len(mesh)))

    # neighbor symmetry and connectivity
    seen = {0}
    stack = [0]
    while stack:
        t = stack.pop()
        for k, n in enumerate(mesh.tri_nbrs[t]):
            if n == BOUNDARY:
                continue
            assert t in mesh.tri_nbrs[n]
            if n not in seen:
                seen.add(n)
                stack.append(n)
    assert len(seen) == len(mesh)

    # every constrained edge has exactly one triangle, on its inner side
    for edge in mesh.edges:
        if edge.is_boundary:
            assert len(edge.triangles) == 1
        else:
            assert len(edge.triangles) == 2
    _assert_delaunay(mesh)

    # environment edges are constrained mesh edges with no extra vertices
    assert len(mesh.points) == len({(p.x, p.y) for p in env.vertices})
    coord_to_vid = {(p.x, p.y): i for i, p in enumerate(mesh.points)}
    for a, b in env.edges:
        u = coord_to_vid[(a.x, a.y)]
        v = coord_to_vid[(b.x, b.y)]
        eid = mesh.edge_id(u, v)
        assert eid is not None and mesh.edges[eid].is_boundary


def test_methods_agree_on_structure():
    env, _, _, _ = cached_map(2)
    m1 = triangulate(env, method="qhull")
    m2 = triangulate(env, method="incremental")
    assert len(m1) == len(m2)
    area1 = math.fsum(signed_area(m1.triangle_points(t))
                      for t in range(len(m1)))
    area2 = math.fsum(signed_area(m2.triangle_points(t))
                      for t in range(len(m2)))
    assert area1 == pytest.approx(area2, rel=1e-12)


def test_ordered_fan_square(square_setup):
    _, mesh, _ = square_setup
    for v in range(4):
        fan = ordered_fan(mesh, v)
        # corners on the diagonal touch both triangles, the others one
        assert len(fan) in (1, 2)
        ofe = outer_fan_edges(mesh, v)
        assert len(ofe) == len(fan)
        for eid, t in ofe:
            assert v not in mesh.edges[eid].vertices
            assert t in fan


def test_fan_matches_exhaustive_incidence(hole_setup):
    _, mesh, _ = hole_setup
    for v in range(len(mesh.points)):
        fan = ordered_fan(mesh, v)
        brute = {t for t in range(len(mesh)) if v in mesh.tri_verts[t]}
        assert set(fan) == brute
        assert len(fan) == len(brute)


def test_fan_ccw_rotation(hole_setup):
    # consecutive fan triangles share the edge between vertex and the
    # previous triangle's far corner, in ccw rotation
    _, mesh, _ = hole_setup
    for v in range(len(mesh.points)):
        for wedge in mesh.vertex_wedges[v]:
            for t_prev, t_next in zip(wedge, wedge[1:]):
                i = mesh.tri_verts[t_prev].index(v)
                assert mesh.tri_nbrs[t_prev][(i + 2) % 3] == t_next


def test_single_triangle_fan():
    env = validate_and_normalize([[(0, 0), (4, 0), (0, 4)]])
    mesh = triangulate(env)
    assert len(mesh) == 1
    for v in range(3):
        assert ordered_fan(mesh, v) == [0]
        (eid, t), = outer_fan_edges(mesh, v)
        assert set(mesh.edges[eid].vertices) == {(v + 1) % 3, (v + 2) % 3}


def test_weakly_simple_vertex_wedges(weak_setup):
    env, mesh, _ = weak_setup
    multi = [v for v in range(len(mesh.points))
             if len(mesh.vertex_wedges[v]) > 1]
    assert len(multi) == 1
    v = multi[0]
    assert mesh.point(v) == Point(8.0, 8.0)
    assert len(mesh.vertex_wedges[v]) == 2
    # expected count for the pinched vertex: entries + 2h - 2 - 2
    entries = sum(len(r) for r in env.rings)
    assert len(mesh) == entries + 2 * len(env.holes) - 2 - 2


def test_boundary_edge_interior_side(hole_setup):
    env, mesh, _ = hole_setup
    # the lone triangle of each constrained edge lies left of the directed
    # environment edge
    coord_to_vid = {(p.x, p.y): i for i, p in enumerate(mesh.points)}
    for ring in env.rings:
        n = len(ring)
        for i in range(n):
            a = coord_to_vid[(ring[i].x, ring[i].y)]
            b = coord_to_vid[(ring[(i + 1) % n].x, ring[(i + 1) % n].y)]
            eid = mesh.edge_id(a, b)
            (t,) = mesh.edges[eid].triangles
            verts = mesh.tri_verts[t]
            k = verts.index(a)
            assert verts[(k + 1) % 3] == b  # interior keeps ccw order a->b


def test_rejects_vertex_on_constraint():
    # a vertex exactly inside another ring's edge fails validation, and the
    # mesh layer guards against it independently
    from polyvis.environment import PolygonalEnvironment, Ring
    outer = Ring(tuple(Point(*c) for c in
                       [(0, 0), (10, 0), (10, 10), (0, 10)]))
    hole = Ring(tuple(Point(*c) for c in [(5, 0), (6, 2), (4, 2)][::-1]))
    env = PolygonalEnvironment(outer=outer, holes=(hole,))
    with pytest.raises(MeshError):
        triangulate(env)

import random

import pytest

from polyvis.environment import EpsilonConfig
from polyvis.geometry import Point
from polyvis.location import Coincidence, build_buckets, locate
from polyvis.mesh import triangulate

from conftest import boundary_distance, cached_map, exhaustive_locate

EXACT_ONLY = EpsilonConfig(eps1_sequence=(), eps2=0.0)


def test_build_rejects_bad_cell_size(square_setup):
    _, mesh, _ = square_setup
    with pytest.raises(Exception):
        build_buckets(mesh, 0.0)
    with pytest.raises(Exception):
        build_buckets(mesh, -1.0)


def test_unit_square_single_cell():
    from polyvis.environment import validate_and_normalize
    env = validate_and_normalize([[(0, 0), (1, 0), (1, 1), (0, 1)]])
    mesh = triangulate(env)
    grid = build_buckets(mesh, 1.0)
    assert grid.cols == 1 and grid.rows == 1
    assert sorted(grid.triangles_in_cell(0)) == [0, 1]


def test_every_triangle_registered(hole_setup):
    _, mesh, grid = hole_setup
    assert grid.cols == 10 and grid.rows == 10
    seen = set()
    for key in range(grid.cols * grid.rows):
        seen.update(grid.triangles_in_cell(key))
    assert seen == set(range(len(mesh)))


def test_registration_is_conservative(hole_setup):
    # any point of any triangle must find that triangle in its own cell
    _, mesh, grid = hole_setup
    rng = random.Random(11)
    for _ in range(4000):
        t = rng.randrange(len(mesh))
        a, b, c = mesh.triangle_points(t)
        u = rng.random()
        v = rng.random() * (1 - u)
        p = Point(a.x + u * (b.x - a.x) + v * (c.x - a.x),
                  a.y + u * (b.y - a.y) + v * (c.y - a.y))
        key = grid.cell_index(p.x, p.y)
        assert key is not None
        assert t in grid.triangles_in_cell(key)


@pytest.mark.parametrize("seed", [0, 4])
def test_locate_equals_exhaustive_scan(seed):
    env, mesh, grid, _ = cached_map(seed)
    minx, miny, maxx, maxy = env.bounding_box
    rng = random.Random(101 + seed)
    pts = [Point(rng.uniform(minx - 1, maxx + 1),
                 rng.uniform(miny - 1, maxy + 1)) for _ in range(20000)]
    want = exhaustive_locate(mesh, pts)
    for p, w in zip(pts, want):
        got = locate(grid, mesh, p, EXACT_ONLY)
        if w is None:
            assert got is None, (p, got)
        else:
            assert got is not None, (p, w)


def test_locate_examples(hole_setup):
    _, mesh, grid = hole_setup
    pl = locate(grid, mesh, Point(2, 5))
    assert pl is not None and pl.coincidence is Coincidence.INTERIOR
    assert pl.snapped_vertex is None and pl.eps1_used is None

    assert locate(grid, mesh, Point(-1, 5)) is None       # outside bbox
    assert locate(grid, mesh, Point(5, 5)) is None        # inside the hole

    pl = locate(grid, mesh, Point(0, 0))                  # exact map vertex
    assert pl.coincidence is Coincidence.ON_VERTEX
    assert pl.snapped_vertex is not None
    assert mesh.point(pl.snapped_vertex) == Point(0, 0)
    assert pl.eps1_used is None

    pl = locate(grid, mesh, Point(1e-13, 1e-13))          # within eps2
    assert pl is not None
    assert mesh.point(pl.snapped_vertex) == Point(0, 0)


def test_eps1_ladder(hole_setup):
    _, mesh, grid = hole_setup
    q = Point(5.0, -1e-12)
    assert locate(grid, mesh, q, EXACT_ONLY) is None
    pl = locate(grid, mesh, q)
    assert pl is not None
    assert pl.eps1_used == 1e-12
    assert pl.coincidence is Coincidence.ON_EDGE
    # distance to the found triangle is within the epsilon used
    a, b, c = mesh.triangle_points(pl.triangle)
    from polyvis.geometry import segment_point_distance
    d = min(segment_point_distance(q.x, q.y, p1.x, p1.y, p2.x, p2.y)
            for p1, p2 in ((a, b), (b, c), (c, a)))
    assert d <= pl.eps1_used


def test_eps1_monotone(hole_setup):
    _, mesh, grid = hole_setup
    q = Point(5.0, -3e-12)
    full = locate(grid, mesh, q)
    assert full is not None
    # any prefix that already accepts must return the same triangle
    seq = list(EpsilonConfig().eps1_sequence)
    idx = seq.index(full.eps1_used)
    for cut in range(idx + 1, len(seq) + 1):
        pl = locate(grid, mesh, q,
                    EpsilonConfig(eps1_sequence=tuple(seq[:cut])))
        assert pl is not None and pl.triangle == full.triangle
    for cut in range(0, idx):
        assert locate(grid, mesh, q,
                      EpsilonConfig(eps1_sequence=tuple(seq[:cut]))) is None


@pytest.mark.parametrize("seed", [1, 5])
def test_no_false_rejections(seed):
    # absent results must be farther than the largest epsilon from the
    # environment
    env, mesh, grid, oracle = cached_map(seed)
    minx, miny, maxx, maxy = env.bounding_box
    rng = random.Random(77 + seed)
    max_eps = 1e-9
    for _ in range(4000):
        p = Point(rng.uniform(minx - 0.5, maxx + 0.5),
                  rng.uniform(miny - 0.5, maxy + 0.5))
        if locate(grid, mesh, p) is None:
            assert oracle.contains(p) < 0
            assert boundary_distance(env, p) > max_eps


def test_boundary_points_accepted(hole_setup):
    env, mesh, grid = hole_setup
    # points exactly on edges and at midpoints locate without epsilon
    for q in (Point(5, 0), Point(0, 5), Point(4, 5), Point(5, 4)):
        pl = locate(grid, mesh, q, EXACT_ONLY)
        assert pl is not None
        assert pl.coincidence in (Coincidence.ON_EDGE,
                                  Coincidence.ON_VERTEX)


def test_snap_only_from_triangle_corners(hole_setup):
    # snapping checks only the located triangle's vertices: a point near a
    # vertex but inside a non-incident triangle must not snap to it
    _, mesh, grid = hole_setup
    pl = locate(grid, mesh, Point(2, 5),
                EpsilonConfig(eps1_sequence=(), eps2=100.0))
    assert pl is not None
    assert pl.snapped_vertex in mesh.tri_verts[pl.triangle]

import random
from fractions import Fraction

import numpy as np
import pytest

from polyvis import (Point, build_buckets, locate, triangulate,
                     validate_and_normalize)
from polyvis.mapgen import big_bench_map, random_map, touching_holes_map
from polyvis.oracle import Oracle

HOLE_RINGS = [
    [(0, 0), (10, 0), (10, 10), (0, 10)],
    [(4, 4), (6, 4), (6, 6), (4, 6)],
]
SQUARE_RINGS = [[(0, 0), (10, 0), (10, 10), (0, 10)]]


@pytest.fixture(scope="session")
def square_env():
    return validate_and_normalize(SQUARE_RINGS)


@pytest.fixture(scope="session")
def hole_env():
    return validate_and_normalize(HOLE_RINGS)


@pytest.fixture(scope="session")
def weak_env():
    return touching_holes_map()


@pytest.fixture(scope="session")
def square_setup(square_env):
    mesh = triangulate(square_env)
    return square_env, mesh, build_buckets(mesh)


@pytest.fixture(scope="session")
def hole_setup(hole_env):
    mesh = triangulate(hole_env)
    return hole_env, mesh, build_buckets(mesh)


@pytest.fixture(scope="session")
def weak_setup(weak_env):
    mesh = triangulate(weak_env)
    return weak_env, mesh, build_buckets(mesh)


_map_cache = {}


def cached_map(seed, **kwargs):
    key = (seed, tuple(sorted(kwargs.items())))
    if key not in _map_cache:
        env = random_map(seed, **kwargs)
        mesh = triangulate(env)
        _map_cache[key] = (env, mesh, build_buckets(mesh), Oracle(env))
    return _map_cache[key]


@pytest.fixture(scope="session")
def bench_setup():
    env = big_bench_map()
    mesh = triangulate(env)
    return env, mesh, build_buckets(mesh)


def exact_orient_fraction(ax, ay, bx, by, cx, cy):
    """Independent rational-arithmetic orientation for predicate audits."""
    det = ((Fraction(bx) - Fraction(ax)) * (Fraction(cy) - Fraction(ay))
           - (Fraction(by) - Fraction(ay)) * (Fraction(cx) - Fraction(ax)))
    return (det > 0) - (det < 0)


def exact_incircle_fraction(ax, ay, bx, by, cx, cy, dx, dy):
    """Independent rational in-circle sign (positive: d strictly inside)."""
    adx = Fraction(ax) - Fraction(dx)
    ady = Fraction(ay) - Fraction(dy)
    bdx = Fraction(bx) - Fraction(dx)
    bdy = Fraction(by) - Fraction(dy)
    cdx = Fraction(cx) - Fraction(dx)
    cdy = Fraction(cy) - Fraction(dy)
    det = ((adx * adx + ady * ady) * (bdx * cdy - cdx * bdy)
           + (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy)
           + (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady))
    return (det > 0) - (det < 0)


def exhaustive_locate(mesh, points):
    """Vectorized brute-force point location over all triangles.

    Returns, per point, a containing triangle id or None; decisions match
    the exact predicates (near-zero signs are recomputed exactly).
    """
    from polyvis.predicates import orientation

    tv = np.array(mesh.tri_verts)
    px = np.array(mesh.px)
    py = np.array(mesh.py)
    ax = px[tv[:, 0]]
    ay = py[tv[:, 0]]
    bx = px[tv[:, 1]]
    by = py[tv[:, 1]]
    cx = px[tv[:, 2]]
    cy = py[tv[:, 2]]
    qx = np.array([p.x for p in points])
    qy = np.array([p.y for p in points])
    out = [None] * len(points)
    chunk = max(1, int(2e7 // max(len(tv), 1)))
    for lo in range(0, len(points), chunk):
        hi = min(len(points), lo + chunk)
        X = qx[lo:hi, None]
        Y = qy[lo:hi, None]
        ok = np.ones((hi - lo, len(tv)), dtype=bool)
        uncertain = np.zeros_like(ok)
        for ex0, ey0, ex1, ey1 in ((ax, ay, bx, by), (bx, by, cx, cy),
                                   (cx, cy, ax, ay)):
            t1 = (ex1 - ex0) * (Y - ey0)
            t2 = (ey1 - ey0) * (X - ex0)
            v = t1 - t2
            bound = 2.0 ** -44 * (np.abs(t1) + np.abs(t2))
            ok &= v >= -bound
            uncertain |= np.abs(v) <= bound
        for i, j in zip(*np.nonzero(ok)):
            pi = lo + int(i)
            if out[pi] is not None:
                continue
            tj = int(j)
            if uncertain[i, j]:
                good = True
                corners = ((ax[tj], ay[tj], bx[tj], by[tj]),
                           (bx[tj], by[tj], cx[tj], cy[tj]),
                           (cx[tj], cy[tj], ax[tj], ay[tj]))
                for p0x, p0y, p1x, p1y in corners:
                    if orientation(p0x, p0y, p1x, p1y,
                                   qx[pi], qy[pi]) < 0:
                        good = False
                        break
                if not good:
                    continue
            out[pi] = tj
    return out


def interior_points(oracle, env, rng, count):
    """Uniform strictly-interior points via rejection sampling."""
    minx, miny, maxx, maxy = env.bounding_box
    pts = []
    while len(pts) < count:
        p = Point(rng.uniform(minx, maxx), rng.uniform(miny, maxy))
        if oracle.contains(p) > 0:
            pts.append(p)
    return pts


def boundary_distance(env, p: Point) -> float:
    from polyvis.geometry import segment_point_distance
    return min(segment_point_distance(p.x, p.y, a.x, a.y, b.x, b.y)
               for a, b in env.edges)

"""Seeded random polygonal environments on integer grids.

Two flavors: rectilinear blobs (union of grid cells with enclosed pockets
becoming holes, heavy on collinear/cocircular degeneracies) and star
polygons with star-shaped holes (general-position-ish angles).  Both
produce integer coordinates and deterministic output for a given seed.
"""

from __future__ import annotations

import math
import random

from .environment import (PolygonalEnvironment, ValidationError,
                          validate_and_normalize)
from .mesh import MeshError, triangulate


def random_map(seed: int, min_vertices: int = 20, max_vertices: int = 200,
               max_holes: int = 5, scale: int = 1) -> PolygonalEnvironment:
    """A random valid environment with a vertex count in the given range
    and at most max_holes holes.  Deterministic per seed."""
    rng = random.Random(seed)
    for attempt in range(200):
        style = rng.random()
        try:
            if style < 0.5:
                side = rng.randrange(
                    max(4, min_vertices // 3), max(6, max_vertices // 3))
                env = grid_blob_map(rng, side, fill=rng.uniform(0.45, 0.75),
                                    scale=scale)
            else:
                env = star_map(rng,
                               n_outer=rng.randrange(max(5, min_vertices // 2),
                                                     max(8, max_vertices)),
                               n_holes=rng.randrange(0, max_holes + 1),
                               scale=scale)
        except (ValidationError, MeshError, ValueError):
            continue
        if env is None:
            continue
        if len(env.holes) > max_holes:
            env = validate_and_normalize(
                [env.outer, *env.holes[:max_holes]])
        n = len(env.vertices)
        if min_vertices <= n <= max_vertices:
            try:
                triangulate(env)
            except MeshError:
                continue
            return env
    raise ValueError(f"no valid map found for seed {seed} within "
                     f"{min_vertices}..{max_vertices} vertices")


def grid_blob_map(rng: random.Random, side: int, fill: float = 0.6,
                  scale: int = 1) -> PolygonalEnvironment | None:
    """Rectilinear environment from a random 4-connected cell blob."""
    cells = {(i, j) for i in range(side) for j in range(side)
             if rng.random() < fill}
    if not cells:
        return None
    cells = _largest_component(cells)
    _fix_pinches(cells, rng, side)
    cells = _largest_component(cells)
    _fix_pinches(cells, rng, side)
    if len(cells) < 4:
        return None
    rings = _extract_loops(cells)
    if not rings:
        return None
    if scale != 1:
        rings = [[(x * scale, y * scale) for x, y in ring] for ring in rings]
    return validate_and_normalize(rings)


def _largest_component(cells: set) -> set:
    remaining = set(cells)
    best: set = set()
    while remaining:
        seed_cell = next(iter(remaining))
        comp = {seed_cell}
        stack = [seed_cell]
        remaining.discard(seed_cell)
        while stack:
            i, j = stack.pop()
            for nb in ((i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)):
                if nb in remaining:
                    remaining.discard(nb)
                    comp.add(nb)
                    stack.append(nb)
        if len(comp) > len(best):
            best = comp
    return best


def _fix_pinches(cells: set, rng: random.Random, side: int):
    """Remove 2x2 checkerboard patterns so no boundary vertex is pinched.

    Filling a cell can create new pinches nearby, so iterate to a fixed
    point; each pass only ever adds cells, which bounds the work."""
    while True:
        fixes = []
        for (i, j) in cells:
            # diagonal neighbor filled, the two adjacent cells empty
            for di, dj in ((1, 1), (1, -1)):
                if ((i + di, j + dj) in cells and (i + di, j) not in cells
                        and (i, j + dj) not in cells):
                    fixes.append(((i + di, j), (i, j + dj)))
        if not fixes:
            return
        for a, b in fixes:
            cells.add(a if rng.random() < 0.5 else b)


def _extract_loops(cells: set):
    """Boundary loops of the cell union as coordinate rings (filled side on
    the left, so the outer loop is ccw and pockets are cw)."""
    edges: dict[tuple, tuple] = {}

    def put(a, b):
        if a in edges:
            raise ValueError("pinched boundary vertex survived the fix pass")
        edges[a] = b

    for (i, j) in cells:
        if (i, j - 1) not in cells:
            put((i, j), (i + 1, j))
        if (i + 1, j) not in cells:
            put((i + 1, j), (i + 1, j + 1))
        if (i, j + 1) not in cells:
            put((i + 1, j + 1), (i, j + 1))
        if (i - 1, j) not in cells:
            put((i, j + 1), (i, j))
    loops = []
    while edges:
        start, nxt = edges.popitem()
        loop = [start]
        while nxt != start:
            loop.append(nxt)
            nxt = edges.pop(nxt)
        loops.append(_merge_collinear(loop))
    return [lp for lp in loops if len(lp) >= 3]


def _merge_collinear(loop):
    out = []
    n = len(loop)
    for k in range(n):
        a = loop[k - 1]
        b = loop[k]
        c = loop[(k + 1) % n]
        if (b[0] - a[0]) * (c[1] - a[1]) != (b[1] - a[1]) * (c[0] - a[0]):
            out.append(b)
    return out


def star_map(rng: random.Random, n_outer: int, n_holes: int,
             scale: int = 1) -> PolygonalEnvironment | None:
    """Star-shaped outer ring with small star-shaped holes."""
    radius = max(30, 2 * n_outer)
    outer = _star_ring(rng, (0, 0), radius, n_outer)
    if outer is None:
        return None
    env = validate_and_normalize([outer])
    rings = [outer]
    for _ in range(n_holes * 8):
        if len(rings) - 1 >= n_holes:
            break
        hr = rng.randrange(max(2, radius // 12), max(3, radius // 5))
        cx = rng.randrange(-radius + hr, radius - hr + 1)
        cy = rng.randrange(-radius + hr, radius - hr + 1)
        hole = _star_ring(rng, (cx, cy), hr, rng.randrange(3, 9))
        if hole is None:
            continue
        try:
            cand = validate_and_normalize(rings + [hole])
        except ValidationError:
            continue
        if len(cand.holes) == len(rings):  # the new ring really is a hole
            rings.append(hole)
            env = cand
    if scale != 1:
        scaled = [[(p.x * scale, p.y * scale) for p in ring]
                  for ring in env.rings]
        env = validate_and_normalize(scaled)
    return env


def _star_ring(rng: random.Random, center, radius: int, n: int):
    angles = sorted(rng.uniform(0.0, 2.0 * math.pi) for _ in range(n))
    pts = []
    for ang in angles:
        r = rng.uniform(0.35, 1.0) * radius
        x = center[0] + round(r * math.cos(ang))
        y = center[1] + round(r * math.sin(ang))
        if not pts or (x, y) != pts[-1]:
            pts.append((x, y))
    if len(pts) >= 2 and pts[0] == pts[-1]:
        pts.pop()
    if len(pts) < 3:
        return None
    return pts


def touching_holes_map(scale: int = 1) -> PolygonalEnvironment:
    """Square with two diamond holes sharing one vertex: the shared vertex
    is weakly simple (two incident edge pairs)."""
    s = scale
    return validate_and_normalize([
        [(0, 0), (16 * s, 0), (16 * s, 16 * s), (0, 16 * s)],
        [(4 * s, 8 * s), (6 * s, 6 * s), (8 * s, 8 * s), (6 * s, 10 * s)],
        [(8 * s, 8 * s), (10 * s, 6 * s), (12 * s, 8 * s), (10 * s, 10 * s)],
    ])


def big_bench_map(seed: int = 7, min_vertices: int = 2000,
                  min_holes: int = 50,
                  scale: int = 8) -> PolygonalEnvironment:
    """A large rectilinear environment for throughput measurements.

    The default scale spreads the map over a few hundred units so that
    1-unit location buckets hold only a few triangles each, matching the
    geometry the bucket default is tuned for."""
    rng = random.Random(seed)
    side = 40
    while True:
        try:
            env = grid_blob_map(rng, side, fill=rng.uniform(0.55, 0.65),
                                scale=scale)
        except (ValidationError, ValueError):
            continue
        if (env is not None and len(env.vertices) >= min_vertices
                and len(env.holes) >= min_holes):
            return env
        side = min(side + 8, 220)

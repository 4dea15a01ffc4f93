"""Polygonal environments: rings, validation, and normalization.

The see-through space is bounded by one outer ring and zero or more hole
rings.  Raw ring soup from files or generators goes through
validate_and_normalize(), which picks the outer boundary, orients rings,
discards disconnected artifacts, and rejects malformed input with a
distinct diagnostic per failure mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import exact
from .geometry import GeometryError, Point, signed_area
from .predicates import COLLINEAR, orientation


class ValidationError(GeometryError):
    """Input rings violate an environment invariant."""

    def __init__(self, reason: str, message: str):
        super().__init__(f"{reason}: {message}")
        self.reason = reason


@dataclass(frozen=True, slots=True)
class Ring:
    """A closed vertex cycle; the edge from the last vertex back to the
    first is implicit."""

    vertices: tuple[Point, ...]

    def __post_init__(self):
        if len(self.vertices) < 3:
            raise ValidationError("too-few-vertices",
                                  f"ring has {len(self.vertices)} vertices")

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def __getitem__(self, i):
        return self.vertices[i]

    @property
    def area(self) -> float:
        return signed_area(self.vertices)

    def reversed(self) -> "Ring":
        return Ring(tuple(reversed(self.vertices)))


def ring_from_coords(coords) -> Ring:
    return Ring(tuple(Point(float(x), float(y)) for x, y in coords))


@dataclass(frozen=True)
class EpsilonConfig:
    """Relaxation constants for point location and vertex snapping.

    eps1_sequence drives the escalating relaxed point-in-triangle retries;
    eps2 is the vertex-snap radius.  Both are in map units.  The defaults
    are the decade sequence 1e-18 .. 1e-9 and 1e-12.
    """

    eps1_sequence: tuple[float, ...] = tuple(10.0 ** -k for k in range(18, 8, -1))
    eps2: float = 1e-12

    def __post_init__(self):
        for a, b in zip(self.eps1_sequence, self.eps1_sequence[1:]):
            if not a < b:
                raise ValidationError("bad-epsilon",
                                      "eps1 sequence must be strictly increasing")
        if any(e < 0 for e in self.eps1_sequence) or self.eps2 < 0:
            raise ValidationError("bad-epsilon", "epsilons must be nonnegative")


DEFAULT_EPSILONS = EpsilonConfig()


@dataclass(frozen=True)
class PolygonalEnvironment:
    outer: Ring
    holes: tuple[Ring, ...] = ()
    diagnostics: tuple[str, ...] = ()

    @property
    def rings(self):
        return (self.outer, *self.holes)

    @property
    def vertices(self) -> list[Point]:
        out = []
        for ring in self.rings:
            out.extend(ring.vertices)
        return out

    @property
    def edges(self) -> list[tuple[Point, Point]]:
        out = []
        for ring in self.rings:
            n = len(ring)
            for i in range(n):
                out.append((ring[i], ring[(i + 1) % n]))
        return out

    @property
    def bounding_box(self):
        xs = [p.x for r in self.rings for p in r]
        ys = [p.y for r in self.rings for p in r]
        return min(xs), min(ys), max(xs), max(ys)

    @property
    def area(self) -> float:
        return signed_area(self.outer.vertices) + sum(
            signed_area(h.vertices) for h in self.holes)

    def vertex_multiplicity(self) -> dict[tuple[float, float], int]:
        """How many ring positions each geometric point occupies."""
        counts: dict[tuple[float, float], int] = {}
        for ring in self.rings:
            for p in ring:
                counts[(p.x, p.y)] = counts.get((p.x, p.y), 0) + 1
        return counts


def _ring_area_sign(ring: Ring) -> int:
    area = signed_area(ring.vertices)
    scale = max(abs(p.x) + abs(p.y) for p in ring) + 1.0
    if abs(area) > len(ring) * scale * scale * 2.0 ** -48:
        return 1 if area > 0 else -1
    coords = [c for p in ring for c in (p.x, p.y)]
    ints = exact._scaled(coords)
    total = 0
    n = len(ring)
    for i in range(n):
        j = (i + 1) % n
        total += ints[2 * i] * ints[2 * j + 1] - ints[2 * j] * ints[2 * i + 1]
    return (total > 0) - (total < 0)


def _check_ring(ring: Ring):
    n = len(ring)
    seen: dict[tuple[float, float], int] = {}
    for i, p in enumerate(ring):
        key = (p.x, p.y)
        if key in seen:
            j = seen[key]
            if (i - j) % n == 1 or (j - i) % n == 1:
                raise ValidationError("duplicate-vertex",
                                      f"consecutive equal vertices at index {j}")
            raise ValidationError("self-intersecting",
                                  f"ring revisits vertex {key}")
        seen[key] = i
    for i in range(n):
        a = ring[i - 1]
        b = ring[i]
        c = ring[(i + 1) % n]
        if orientation(a.x, a.y, b.x, b.y, c.x, c.y) == COLLINEAR:
            # collinear is fine unless the walk reverses direction (spike)
            if exact.compare_dot(b.x, b.y, a.x, a.y, c.x, c.y) > 0:
                raise ValidationError("zero-area-spike",
                                      f"spike at vertex index {i}")
    if _ring_area_sign(ring) == 0:
        raise ValidationError("degenerate-ring", "ring has zero area")


class _EdgeIndex:
    """Uniform grid over edge bounding boxes for candidate-pair lookup."""

    def __init__(self, entries, cell: float):
        self.cell = cell
        self.grid: dict[tuple[int, int], list[int]] = {}
        self.entries = entries
        for idx, (_, _, ax, ay, bx, by) in enumerate(entries):
            x0 = math.floor(min(ax, bx) / cell)
            x1 = math.floor(max(ax, bx) / cell)
            y0 = math.floor(min(ay, by) / cell)
            y1 = math.floor(max(ay, by) / cell)
            for gx in range(x0, x1 + 1):
                for gy in range(y0, y1 + 1):
                    self.grid.setdefault((gx, gy), []).append(idx)

    def candidate_pairs(self):
        seen = set()
        for bucket in self.grid.values():
            m = len(bucket)
            for i in range(m):
                for j in range(i + 1, m):
                    pair = (bucket[i], bucket[j])
                    if pair not in seen:
                        seen.add(pair)
                        yield pair


def _collect_edges(rings):
    entries = []
    for ri, ring in enumerate(rings):
        n = len(ring)
        for i in range(n):
            a = ring[i]
            b = ring[(i + 1) % n]
            entries.append((ri, i, a.x, a.y, b.x, b.y))
    return entries


def _check_edge_pairs(rings):
    entries = _collect_edges(rings)
    total_len = sum(math.hypot(bx - ax, by - ay)
                    for _, _, ax, ay, bx, by in entries)
    cell = max(total_len / len(entries), 1e-9)
    index = _EdgeIndex(entries, cell)
    for ia, ib in index.candidate_pairs():
        ra, ea, ax, ay, bx, by = entries[ia]
        rb, eb, cx, cy, dx, dy = entries[ib]
        if (min(ax, bx) > max(cx, dx) or min(cx, dx) > max(ax, bx)
                or min(ay, by) > max(cy, dy) or min(cy, dy) > max(ay, by)):
            continue
        same_ring = ra == rb
        na = len(rings[ra])
        adjacent = same_ring and ((ea + 1) % na == eb or (eb + 1) % na == ea)
        if exact.segments_cross(ax, ay, bx, by, cx, cy, dx, dy):
            raise ValidationError(
                "self-intersecting" if same_ring else "rings-cross",
                f"edges {ra}:{ea} and {rb}:{eb} cross")
        if adjacent:
            continue
        shared = {(ax, ay), (bx, by)} & {(cx, cy), (dx, dy)}
        for qx, qy in ((cx, cy), (dx, dy)):
            if (qx, qy) in shared:
                continue
            if exact.on_segment(qx, qy, ax, ay, bx, by):
                raise ValidationError(
                    "self-intersecting" if same_ring else "vertex-on-edge",
                    f"vertex ({qx}, {qy}) lies inside edge {ra}:{ea}")
        for qx, qy in ((ax, ay), (bx, by)):
            if (qx, qy) in shared:
                continue
            if exact.on_segment(qx, qy, cx, cy, dx, dy):
                raise ValidationError(
                    "self-intersecting" if same_ring else "vertex-on-edge",
                    f"vertex ({qx}, {qy}) lies inside edge {rb}:{eb}")
        if shared and same_ring:
            raise ValidationError("self-intersecting",
                                  f"ring {ra} touches itself at {shared.pop()}")


def _point_in_ring(p: Point, ring: Ring) -> int:
    xs = [v.x for v in ring]
    ys = [v.y for v in ring]
    return exact.point_in_ring(p.x, p.y, xs, ys)


def validate_and_normalize(rings) -> PolygonalEnvironment:
    """Build a PolygonalEnvironment from raw rings.

    The largest-area ring becomes the outer boundary (normalized ccw);
    rings strictly inside it become holes (normalized cw); rings outside
    it or nested inside holes are discarded with a diagnostic.  Malformed
    rings raise ValidationError.
    """
    rings = [r if isinstance(r, Ring) else ring_from_coords(r) for r in rings]
    if not rings:
        raise ValidationError("no-rings", "at least one ring is required")
    for ring in rings:
        _check_ring(ring)
    _check_edge_pairs(rings)

    areas = [abs(signed_area(r.vertices)) for r in rings]
    outer_idx = max(range(len(rings)), key=lambda i: areas[i])
    outer = rings[outer_idx]
    if _ring_area_sign(outer) < 0:
        outer = outer.reversed()

    outer_keys = {(p.x, p.y) for p in outer}
    holes: list[Ring] = []
    diagnostics: list[str] = []
    candidates: list[Ring] = []
    for i, ring in enumerate(rings):
        if i == outer_idx:
            continue
        shared = [(p.x, p.y) for p in ring if (p.x, p.y) in outer_keys]
        if shared:
            raise ValidationError(
                "hole-touches-outer",
                f"ring {i} shares vertex {shared[0]} with the outer boundary")
        side = _point_in_ring(ring[0], outer)
        if side == 0:
            raise ValidationError(
                "hole-touches-outer",
                f"ring {i} has a vertex on the outer boundary")
        if side < 0:
            diagnostics.append(
                f"discarded ring {i}: outside the outer boundary")
            continue
        candidates.append(ring)

    for i, ring in enumerate(candidates):
        nested = False
        for j, other in enumerate(candidates):
            if i == j:
                continue
            other_keys = {(p.x, p.y) for p in other}
            probe = next((p for p in ring if (p.x, p.y) not in other_keys), None)
            if probe is not None and _point_in_ring(probe, other) > 0:
                nested = True
                break
        if nested:
            diagnostics.append(
                "discarded ring: nested inside another hole")
            continue
        if _ring_area_sign(ring) > 0:
            ring = ring.reversed()
        holes.append(ring)

    return PolygonalEnvironment(outer=outer, holes=tuple(holes),
                                diagnostics=tuple(diagnostics))

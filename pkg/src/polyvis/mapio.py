"""Text file formats: MAP v1 environments and POINTS v1 query sets.

Coordinates are serialized with shortest round-trip precision (repr), so
save/load cycles are bit-exact.
"""

from __future__ import annotations

from .environment import PolygonalEnvironment, validate_and_normalize
from .geometry import GeometryError, Point
from .harness import QuerySet


class MapFormatError(GeometryError):
    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.line_no = line_no


def load_map(path) -> PolygonalEnvironment:
    """Parse a MAP v1 file and normalize its rings into an environment."""
    rings = []
    current = None
    expect = 0
    with open(path) as fh:
        lines = fh.readlines()
    if not lines or lines[0].split("#")[0].strip() != "MAP v1":
        raise MapFormatError(path, 1, "expected header 'MAP v1'")
    for no, raw in enumerate(lines[1:], start=2):
        line = raw.split("#")[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "RING":
            if current is not None and expect != 0:
                raise MapFormatError(path, no,
                                     f"ring short by {expect} vertices")
            if len(parts) != 2 or not parts[1].isdigit():
                raise MapFormatError(path, no, "expected 'RING <count>'")
            expect = int(parts[1])
            if expect < 3:
                raise MapFormatError(path, no,
                                     f"ring needs >= 3 vertices, got {expect}")
            current = []
            rings.append(current)
            continue
        if current is None:
            raise MapFormatError(path, no, "coordinates before any RING")
        if expect == 0:
            raise MapFormatError(path, no, "more coordinates than declared")
        if len(parts) != 2:
            raise MapFormatError(path, no, f"expected '<x> <y>', got {line!r}")
        try:
            x = float(parts[0])
            y = float(parts[1])
        except ValueError:
            raise MapFormatError(path, no, f"bad number in {line!r}")
        try:
            current.append(Point(x, y))
        except GeometryError as exc:
            raise MapFormatError(path, no, str(exc))
        expect -= 1
    if current is not None and expect != 0:
        raise MapFormatError(path, len(lines),
                             f"ring short by {expect} vertices")
    if not rings:
        raise MapFormatError(path, len(lines), "no rings in file")
    return validate_and_normalize(rings)


def save_map(env: PolygonalEnvironment, path):
    with open(path, "w") as fh:
        fh.write("MAP v1\n")
        for ring in env.rings:
            fh.write(f"RING {len(ring)}\n")
            for p in ring:
                fh.write(f"{p.x!r} {p.y!r}\n")


def save_points(query_set: QuerySet, path):
    """POINTS v1: kind, seed, then one `x y [provenance...]` line per
    point."""
    with open(path, "w") as fh:
        fh.write("POINTS v1\n")
        fh.write(f"KIND {query_set.kind}\n")
        fh.write(f"SEED {query_set.seed}\n")
        fh.write(f"COUNT {len(query_set.points)}\n")
        for p, prov in zip(query_set.points, query_set.provenance):
            extra = ""
            if isinstance(prov, tuple):
                extra = f" src={prov[0]} sigma={prov[1]!r}"
            elif prov is not None:
                extra = f" src={prov}"
            fh.write(f"{p.x!r} {p.y!r}{extra}\n")


def load_points(path) -> QuerySet:
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    if not lines or lines[0].strip() != "POINTS v1":
        raise MapFormatError(path, 1, "expected header 'POINTS v1'")
    kind = None
    seed = 0
    count = None
    points = []
    provenance = []
    for no, raw in enumerate(lines[1:], start=2):
        line = raw.split("#")[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "KIND":
            kind = parts[1]
            continue
        if parts[0] == "SEED":
            seed = int(parts[1])
            continue
        if parts[0] == "COUNT":
            count = int(parts[1])
            continue
        try:
            x = float(parts[0])
            y = float(parts[1])
        except (ValueError, IndexError):
            raise MapFormatError(path, no, f"bad point line {line!r}")
        prov = None
        src = None
        sigma = None
        for token in parts[2:]:
            key, _, value = token.partition("=")
            if key == "src":
                src = int(value) if value != "None" else None
            elif key == "sigma":
                sigma = float(value)
        if sigma is not None:
            prov = (src, sigma)
        elif src is not None:
            prov = src
        points.append(Point(x, y))
        provenance.append(prov)
    if kind is None:
        raise MapFormatError(path, 1, "missing KIND")
    if count is not None and count != len(points):
        raise MapFormatError(path, len(lines),
                             f"declared {count} points, found {len(points)}")
    return QuerySet(kind, points, seed, provenance)

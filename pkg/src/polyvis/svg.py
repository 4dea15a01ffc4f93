"""Deterministic SVG rendering of environments and query outputs.

The environment is drawn as one even-odd path (holes become cutouts);
regions overlay it semi-transparently with true circular-arc commands for
unsampled range-limited boundaries; graphs draw as segments and query
points as markers.  Output bytes depend only on the inputs.
"""

from __future__ import annotations

import math

from .engine import EdgeKind, RadialVisibilityRegion
from .environment import PolygonalEnvironment
from .geometry import Point

_STYLE_ENV = 'fill="#d0d7de" stroke="#1f2328" stroke-width="{w}"'
_STYLE_REGION = ('fill="#2da44e" fill-opacity="0.35" stroke="#1a7f37" '
                 'stroke-width="{w}"')
_STYLE_EDGE = 'stroke="#0969da" stroke-width="{w}"'
_STYLE_POINT = 'fill="#cf222e"'


def _fmt(v: float) -> str:
    return repr(float(v))


def _ring_path(points, close=True) -> str:
    cmds = []
    for i, p in enumerate(points):
        cmds.append(f"{'M' if i == 0 else 'L'} {_fmt(p.x)} {_fmt(p.y)}")
    if close:
        cmds.append("Z")
    return " ".join(cmds)


def _region_path(region: RadialVisibilityRegion) -> str:
    verts = region.vertices
    n = len(verts)
    if n == 0:
        return ""
    cmds = [f"M {_fmt(verts[0].point.x)} {_fmt(verts[0].point.y)}"]
    r = region.radius
    for i in range(n):
        nxt = verts[(i + 1) % n].point
        kind = region.edge_kinds[i][0]
        if kind is EdgeKind.ARC and r is not None:
            cur = verts[i].point
            a0 = math.atan2(cur.y - region.seed.y, cur.x - region.seed.x)
            a1 = math.atan2(nxt.y - region.seed.y, nxt.x - region.seed.x)
            span = (a1 - a0) % (2.0 * math.pi)
            large = 1 if span > math.pi else 0
            cmds.append(f"A {_fmt(r)} {_fmt(r)} 0 {large} 1 "
                        f"{_fmt(nxt.x)} {_fmt(nxt.y)}")
        else:
            cmds.append(f"L {_fmt(nxt.x)} {_fmt(nxt.y)}")
    cmds.append("Z")
    return " ".join(cmds)


def render_svg(env: PolygonalEnvironment, path, regions=(), graphs=(),
               points=(), rays=(), size: float = 640.0):
    """Write an SVG of the environment with optional overlays.

    regions: RadialVisibilityRegion instances (arc edges stay arcs);
    graphs: sequences of (Point, Point) segments; points: Point markers;
    rays: (origin Point, hit Point) pairs.
    """
    minx, miny, maxx, maxy = env.bounding_box
    w = maxx - minx or 1.0
    h = maxy - miny or 1.0
    margin = 0.03 * max(w, h)
    stroke = max(w, h) / 400.0
    view = (f"{_fmt(minx - margin)} {_fmt(miny - margin)} "
            f"{_fmt(w + 2 * margin)} {_fmt(h + 2 * margin)}")
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(size)}" '
        f'height="{_fmt(size * h / w)}" viewBox="{view}">',
        # flip the y axis so larger y renders upward
        f'<g transform="translate(0 {_fmt(miny + maxy)}) scale(1 -1)">',
    ]
    env_path = " ".join(_ring_path(ring.vertices) for ring in env.rings)
    out.append(f'<path d="{env_path}" fill-rule="evenodd" '
               + _STYLE_ENV.format(w=_fmt(stroke)) + "/>")
    for region in regions:
        out.append(f'<path d="{_region_path(region)}" '
                   + _STYLE_REGION.format(w=_fmt(stroke)) + "/>")
    for segments in graphs:
        for a, b in segments:
            out.append(f'<line x1="{_fmt(a.x)}" y1="{_fmt(a.y)}" '
                       f'x2="{_fmt(b.x)}" y2="{_fmt(b.y)}" '
                       + _STYLE_EDGE.format(w=_fmt(stroke * 0.7)) + "/>")
    for origin, hit in rays:
        out.append(f'<line x1="{_fmt(origin.x)}" y1="{_fmt(origin.y)}" '
                   f'x2="{_fmt(hit.x)}" y2="{_fmt(hit.y)}" '
                   + _STYLE_EDGE.format(w=_fmt(stroke)) + "/>")
        out.append(f'<circle cx="{_fmt(hit.x)}" cy="{_fmt(hit.y)}" '
                   f'r="{_fmt(2.2 * stroke)}" ' + _STYLE_POINT + "/>")
    for p in points:
        out.append(f'<circle cx="{_fmt(p.x)}" cy="{_fmt(p.y)}" '
                   f'r="{_fmt(2.2 * stroke)}" ' + _STYLE_POINT + "/>")
    out.append("</g>")
    out.append("</svg>")
    data = "\n".join(out) + "\n"
    with open(path, "w") as fh:
        fh.write(data)
    return data

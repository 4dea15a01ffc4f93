"""
Range-limited visibility with circular arcs
===========================================

A limited sight radius d turns parts of the region boundary into circular
arcs.  The raw clipped region keeps true arcs (rendered as SVG arc
commands); sampling replaces them with short chords for plain-polygon
consumers.
"""

import math

from polyvis import (Point, Visibility, intersect_with_circle,
                     sample_arc_edges, to_polygon, to_radial,
                     visibility_region)
from polyvis.engine import EdgeKind
from polyvis.geometry import signed_area
from polyvis.svg import render_svg

vis = Visibility.from_rings([
    [(0, 0), (10, 0), (10, 10), (0, 10)],
    [(4, 4), (6, 4), (6, 6), (4, 6)],
])

q = Point(2, 5)
loc = vis.locate(q)

for d in (1.5, 3.0, 6.0):
    region, _ = visibility_region(vis.mesh, loc, q, d)
    radial = intersect_with_circle(to_radial(vis.mesh, region), d)
    arcs = sum(k[0] is EdgeKind.ARC for k in radial.edge_kinds)
    sampled = sample_arc_edges(radial, math.pi / 180)
    area = signed_area([v.point for v in sampled.vertices])
    print(f"d={d}: {arcs} arc edges, sampled area {area:.4f} "
          f"(disk area {math.pi * d * d:.4f})")
    if d == 3.0:
        render_svg(vis.env, "range_region.svg", regions=[radial],
                   points=[q])
        print("wrote range_region.svg (with true arc commands)")

polygon = to_polygon(sample_arc_edges(
    intersect_with_circle(to_radial(vis.mesh, visibility_region(
        vis.mesh, loc, q, 2.0)[0]), 2.0)))
print(f"d=2 disk sampled at pi/180: {len(polygon.vertices)} vertices")

"""
Two-point visibility and ray shooting
=====================================

Directed queries traverse only the triangles along the sight line, so
they stay cheap even in large environments.
"""

import math

from polyvis import Direction, Point, QueryStats, Visibility, shoot_ray, \
    two_point_visible
from polyvis.svg import render_svg

vis = Visibility.from_rings([
    [(0, 0), (10, 0), (10, 10), (0, 10)],
    [(4, 4), (6, 4), (6, 6), (4, 6)],
])

q = Point(2, 5)
loc = vis.locate(q)

for target in (Point(8, 5), Point(5, 2), Point(5, 8)):
    stats = QueryStats()
    seen = two_point_visible(vis.mesh, loc, q, target, stats=stats)
    print(f"({q.x},{q.y}) -> ({target.x},{target.y}): "
          f"{'visible' if seen else 'blocked'} "
          f"({stats.triangles_traversed} triangles walked)")

rays = []
for k in range(12):
    ang = 2 * math.pi * k / 12
    hit = shoot_ray(vis.mesh, loc, q, Direction(math.cos(ang),
                                                math.sin(ang)))
    rays.append((q, hit))
    print(f"ray at {math.degrees(ang):5.1f} deg hits "
          f"({hit.x:.4f}, {hit.y:.4f})")

render_svg(vis.env, "rays.svg", rays=rays, points=[q])
print("wrote rays.svg")

"""
Visibility polygon from a point
===============================

Build a small environment with one hole, compute the visibility region of
a query point through the full pipeline, and render the result to SVG.
"""

from polyvis import Point, Visibility, to_polygon
from polyvis.geometry import signed_area
from polyvis.svg import render_svg

vis = Visibility.from_rings([
    [(0, 0), (10, 0), (10, 10), (0, 10)],   # outer boundary
    [(4, 4), (6, 4), (6, 6), (4, 6)],       # a square hole
])

q = Point(2, 5)
region = vis.region(q)
poly = to_polygon(region)

print(f"query point ({q.x}, {q.y})")
print(f"region has {len(poly.vertices)} vertices, "
      f"area {signed_area(poly.vertices):.3f} "
      f"(environment area {vis.env.area:.3f})")
for p in poly.vertices:
    print(f"  ({p.x}, {p.y})")

render_svg(vis.env, "region.svg", regions=[region], points=[q])
print("wrote region.svg")

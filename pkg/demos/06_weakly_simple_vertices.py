"""
Weakly simple vertices
======================

Two holes touching at a single point give that point two pairs of
incident boundary edges.  A visibility query seeded exactly there expands
every incident wedge, producing a region that passes through the seed
twice.
"""

from polyvis import Point, locate, to_radial, visibility_region
from polyvis.geometry import signed_area
from polyvis.harness import detect_weakly_simple
from polyvis.location import build_buckets
from polyvis.mapgen import touching_holes_map
from polyvis.mesh import triangulate
from polyvis.svg import render_svg

env = touching_holes_map()
mesh = triangulate(env)
grid = build_buckets(mesh)

pinch = Point(8, 8)
print(f"({pinch.x}, {pinch.y}) weakly simple:",
      detect_weakly_simple(env, pinch))
print(f"(0, 0) weakly simple:", detect_weakly_simple(env, Point(0, 0)))

vid = next(i for i, p in enumerate(mesh.points) if p == pinch)
print(f"wedges at the pinch vertex: {len(mesh.vertex_wedges[vid])}")

loc = locate(grid, mesh, pinch)
region, stats = visibility_region(mesh, loc, pinch)
radial = to_radial(mesh, region)
seed_hits = sum(1 for v in radial.vertices if v.point == pinch)
print(f"region boundary passes through the seed {seed_hits} times")
print(f"region area {signed_area([v.point for v in radial.vertices]):.3f} "
      f"of environment area {env.area:.3f}")

render_svg(env, "weak_vertex.svg", regions=[radial], points=[pinch])
print("wrote weak_vertex.svg")

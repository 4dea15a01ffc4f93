"""
Visibility graphs
=================

Build the three visibility subgraphs (vertex-vertex, point-point,
vertex-point) over a random environment and merge them; the merged edge
count is exactly the sum of the parts.
"""

import random

from polyvis import Point, locate
from polyvis.graphs import (PP, VP, VV, format_graph, merge_graphs,
                            point_point_graph, vertex_point_graph,
                            vertex_vertex_graph)
from polyvis.mapgen import random_map
from polyvis.mesh import triangulate
from polyvis.location import build_buckets
from polyvis.oracle import Oracle
from polyvis.svg import render_svg

env = random_map(17, max_vertices=40)
mesh = triangulate(env)
grid = build_buckets(mesh)
oracle = Oracle(env)

rng = random.Random(5)
minx, miny, maxx, maxy = env.bounding_box
free_points = []
while len(free_points) < 8:
    p = Point(rng.uniform(minx, maxx), rng.uniform(miny, maxy))
    if oracle.contains(p) > 0:
        free_points.append(p)
located = [(p, locate(grid, mesh, p)) for p in free_points]
vertex_ids = list(range(len(mesh.points)))

g_vv = vertex_vertex_graph(mesh, vertex_ids)
g_pp = point_point_graph(mesh, located)
g_vp = vertex_point_graph(mesh, vertex_ids, located)
merged = merge_graphs(g_vv, g_pp, g_vp)

print(f"{len(vertex_ids)} vertex sites, {len(free_points)} point sites")
print(f"VV edges: {g_vv.edge_count()}")
print(f"PP edges: {g_pp.edge_count()}")
print(f"VP edges: {g_vp.edge_count()}")
print(f"merged:   {merged.edge_count()} "
      f"(= {g_vv.edge_count()} + {g_pp.edge_count()} + "
      f"{g_vp.edge_count()})")
print("first lines of the export format:")
for line in format_graph(merged).splitlines()[:5]:
    print(" ", line)

segments = []
for tag, a, b in sorted(merged.edges):
    pa = mesh.point(merged.vertex_sites[a]) if tag in (VV, VP) \
        else located[a][0]
    pb = located[b][0] if tag in (PP, VP) \
        else mesh.point(merged.vertex_sites[b])
    segments.append((pa, pb))
render_svg(env, "graph.svg", graphs=[segments], points=free_points)
print("wrote graph.svg")

"""Visibility graphs over environment vertices and free points.

Sites are environment vertices (V) and non-vertex points (P); the three
subgraphs (vertex-vertex, point-point, vertex-point) partition the full
graph's edges and merge losslessly.  Construction runs one visibility
query per site; each undirected pair is decided from its lower-index
endpoint, and the queries' symmetry is a tested property rather than a
runtime assumption.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .engine import visible_points, visible_vertices
from .geometry import GeometryError, Point
from .location import PointLocation, locate
from .mesh import TriMesh

VV = "VV"
PP = "PP"
VP = "VP"


@dataclass
class VisibilityGraph:
    """Undirected visibility graph over vertex sites and point sites.

    Edges are (tag, i, j) index pairs with i < j; vertex sites index into
    vertex_sites, point sites into point_sites, and VP edges pair a vertex
    index with a point index.
    """

    vertex_sites: tuple[int, ...] = ()
    point_sites: tuple = ()  # (Point, PointLocation) pairs
    edges: set = field(default_factory=set)
    skipped_points: tuple[int, ...] = ()

    def edge_count(self, tag=None):
        if tag is None:
            return len(self.edges)
        return sum(1 for e in self.edges if e[0] == tag)


def _check_disjoint(mesh: TriMesh, vertex_ids, points):
    vert_coords = {(mesh.px[v], mesh.py[v]) for v in vertex_ids}
    for p, _ in points:
        if (p.x, p.y) in vert_coords:
            raise GeometryError(
                f"point site ({p.x}, {p.y}) coincides with a vertex site")


def vertex_vertex_graph(mesh: TriMesh, vertex_ids,
                        d: float | None = None) -> VisibilityGraph:
    """Edges between mutually visible environment vertices."""
    vertex_ids = tuple(vertex_ids)
    index_of = {v: i for i, v in enumerate(vertex_ids)}
    id_set = set(vertex_ids)
    edges = set()
    for i, v in enumerate(vertex_ids):
        loc = _vertex_location(mesh, v)
        seen = visible_vertices(mesh, loc, mesh.point(v), among=id_set, d=d)
        for w in seen:
            j = index_of[w]
            if j > i:
                edges.add((VV, i, j))
    return VisibilityGraph(vertex_sites=vertex_ids, edges=edges)


def point_point_graph(mesh: TriMesh, located_points,
                      d: float | None = None) -> VisibilityGraph:
    """Edges between mutually visible free points.

    located_points is a sequence of (Point, PointLocation-or-None); sites
    without a location are excluded and reported in skipped_points.
    """
    located_points = tuple(located_points)
    usable = [i for i, (_, loc) in enumerate(located_points)
              if loc is not None]
    skipped = tuple(i for i, (_, loc) in enumerate(located_points)
                    if loc is None)
    edges = set()
    for pos, i in enumerate(usable):
        p, loc = located_points[i]
        targets = [located_points[j] for j in usable[pos + 1:]]
        vis, _ = visible_points(mesh, loc, p, targets, d=d)
        for rel in vis:
            edges.add((PP, i, usable[pos + 1 + rel]))
    return VisibilityGraph(point_sites=located_points, edges=edges,
                           skipped_points=skipped)


def vertex_point_graph(mesh: TriMesh, vertex_ids, located_points,
                       d: float | None = None) -> VisibilityGraph:
    """Edges between a vertex site and a visible free point site."""
    vertex_ids = tuple(vertex_ids)
    located_points = tuple(located_points)
    _check_disjoint(mesh, vertex_ids, [lp for lp in located_points
                                       if lp[1] is not None])
    skipped = tuple(i for i, (_, loc) in enumerate(located_points)
                    if loc is None)
    usable = [(i, lp) for i, lp in enumerate(located_points)
              if lp[1] is not None]
    edges = set()
    for vi, v in enumerate(vertex_ids):
        loc = _vertex_location(mesh, v)
        vis, _ = visible_points(mesh, loc, mesh.point(v),
                                [lp for _, lp in usable], d=d)
        for rel in vis:
            edges.add((VP, vi, usable[rel][0]))
    return VisibilityGraph(vertex_sites=vertex_ids,
                           point_sites=located_points, edges=edges,
                           skipped_points=skipped)


def merge_graphs(g_vv: VisibilityGraph, g_pp: VisibilityGraph,
                 g_vp: VisibilityGraph) -> VisibilityGraph:
    """Disjoint union of the three subgraphs over identical site sets."""
    if g_vv.vertex_sites != g_vp.vertex_sites:
        raise GeometryError("vertex site sets differ between VV and VP")
    if g_pp.point_sites != g_vp.point_sites:
        raise GeometryError("point site sets differ between PP and VP")
    edges = set()
    for g in (g_vv, g_pp, g_vp):
        if edges & g.edges:
            raise GeometryError("subgraph edges overlap")
        edges |= g.edges
    return VisibilityGraph(vertex_sites=g_vv.vertex_sites,
                           point_sites=g_pp.point_sites, edges=edges,
                           skipped_points=g_pp.skipped_points)


def _vertex_location(mesh: TriMesh, v: int) -> PointLocation:
    from .location import Coincidence
    t = mesh.vertex_wedges[v][0][0]
    return PointLocation(triangle=t, coincidence=Coincidence.ON_VERTEX,
                         vertex=v, snapped_vertex=v)


def format_graph(graph: VisibilityGraph) -> str:
    """Deterministic text form: one `<tag> <a> <b>` line per edge, ordered
    by tag then indices."""
    order = {VV: 0, PP: 1, VP: 2}
    lines = sorted(graph.edges, key=lambda e: (order[e[0]], e[1], e[2]))
    return "\n".join(f"{tag} {a} {b}" for tag, a, b in lines) + (
        "\n" if lines else "")


def build_full_graph(mesh: TriMesh, vertex_ids, located_points,
                     d: float | None = None) -> VisibilityGraph:
    """Convenience: the three subgraphs merged."""
    return merge_graphs(
        vertex_vertex_graph(mesh, vertex_ids, d),
        point_point_graph(mesh, located_points, d),
        vertex_point_graph(mesh, vertex_ids, located_points, d))

"""Visibility queries in 2D polygonal environments with holes.

Preprocess an environment once (constrained Delaunay triangulation plus a
bucket grid for point location), then answer visibility polygons,
two-point and ray queries, visible vertices/points, and visibility
graphs, all with an optional range limit.  An exact brute-force reference
lives in polyvis.oracle, and polyvis.harness provides the differential
benchmark machinery built on it.
"""

from .environment import (DEFAULT_EPSILONS, EpsilonConfig,
                          PolygonalEnvironment, Ring, ValidationError,
                          ring_from_coords, validate_and_normalize)
from .engine import (AbstractVisibilityRegion, EdgeKind, MalformedRegionError,
                     QueryStats, RadialVisibilityRegion, RadialVertex,
                     VertexKind, canonical_polygon, intersect_with_circle,
                     sample_arc_edges, shoot_ray, to_polygon, to_radial,
                     two_point_visible, visibility_region, visible_points,
                     visible_vertices)
from .geometry import Direction, GeometryError, Point, PointInTriangle
from .location import (BucketGrid, Coincidence, PointLocation, build_buckets,
                       locate)
from .mesh import (BOUNDARY, MeshError, TriMesh, ordered_fan, outer_fan_edges,
                   triangulate)

__all__ = [
    "AbstractVisibilityRegion", "BOUNDARY", "BucketGrid", "Coincidence",
    "DEFAULT_EPSILONS", "Direction", "EdgeKind", "EpsilonConfig",
    "GeometryError", "MalformedRegionError", "MeshError", "Point",
    "PointInTriangle", "PointLocation", "PolygonalEnvironment", "QueryStats",
    "RadialVisibilityRegion", "RadialVertex", "Ring", "TriMesh",
    "ValidationError", "VertexKind", "Visibility", "build_buckets",
    "canonical_polygon",
    "intersect_with_circle", "locate", "ordered_fan", "outer_fan_edges",
    "ring_from_coords", "sample_arc_edges", "shoot_ray", "to_polygon",
    "to_radial", "triangulate", "two_point_visible", "validate_and_normalize",
    "visibility_region", "visible_points", "visible_vertices",
]

__version__ = "0.1.0"


class Visibility:
    """Convenience wrapper bundling environment, mesh, buckets and epsilons.

    >>> vis = Visibility.from_rings([[(0, 0), (10, 0), (10, 10), (0, 10)]])
    >>> loc = vis.locate(Point(5, 5))
    >>> poly = vis.region_polygon(Point(5, 5), loc)
    """

    def __init__(self, env: PolygonalEnvironment, cell_size: float = 1.0,
                 epsilons: EpsilonConfig = DEFAULT_EPSILONS):
        self.env = env
        self.epsilons = epsilons
        self.mesh = triangulate(env)
        self.grid = build_buckets(self.mesh, cell_size)

    @classmethod
    def from_rings(cls, rings, **kwargs):
        return cls(validate_and_normalize(rings), **kwargs)

    def locate(self, q: Point):
        return locate(self.grid, self.mesh, q, self.epsilons)

    def region(self, q: Point, loc=None, d=None,
               max_angle=None) -> RadialVisibilityRegion | None:
        """Radial visibility region of q (range-limited when d is given),
        or None when q lies outside the environment."""
        if loc is None:
            loc = self.locate(q)
            if loc is None:
                return None
        abs_region, _ = visibility_region(self.mesh, loc, q, d)
        radial = to_radial(self.mesh, abs_region)
        if d is not None:
            radial = intersect_with_circle(radial, d)
            import math as _math
            radial = sample_arc_edges(
                radial, max_angle if max_angle is not None
                else _math.pi / 180.0)
        return radial

    def region_polygon(self, q: Point, loc=None, d=None) -> Ring | None:
        radial = self.region(q, loc, d)
        return None if radial is None else to_polygon(radial)

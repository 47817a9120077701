"""
Planar set objects used for motion predictions, obstacles and workspaces.
Disk, Polygon and ConeHull are closed convex sets; PointChain is an ordered
polyline used for forward-reachable motion sets.
"""

import numpy as np

from pirouette.utils import as_vec2, as_points, check_nonnegative, DomainError
from pirouette.geometry.primitives import cross

np.seterr(over="raise")

# sine of the angle below which three hull vertices count as collinear
COLLINEAR_TOL = 1e-9
# relative distance below which two vertices are merged
COINCIDENT_TOL = 1e-12

# ---------------------------------------------------------------------------------------------------------------------
# Disk
# ---------------------------------------------------------------------------------------------------------------------


class Disk(object):
    """Closed Euclidean ball B(center, radius)."""

    kind = "disk"

    def __init__(self, center, radius):
        """
        Description
        ----------
        Closed disk in the plane.

        Parameters
        ----------
        center: array_like
            Disk center in meters.
        radius: Float
            Disk radius in meters. A zero radius gives a single point.

        Returns
        ----------
        Disk object
        """
        self.center = as_vec2(center)
        self.radius = check_nonnegative(radius, "Radius")

    @property
    def vertices(self):
        return self.center.reshape(1, 2)

    def farthest_distance(self, point):
        """Largest distance from point to any member of the disk."""
        return float(np.linalg.norm(as_vec2(point) - self.center) + self.radius)

    def to_record(self):
        return {"type": self.kind, "center": self.center.tolist(), "radius": self.radius}

    def __repr__(self):
        return "Disk(center={}, radius={})".format(self.center.tolist(), self.radius)

# ---------------------------------------------------------------------------------------------------------------------
# Convex Polygon
# ---------------------------------------------------------------------------------------------------------------------


def _merge_vertices(points):
    """
    Remove repeated and collinear vertices from a closed counterclockwise
    vertex cycle.
    """
    scale = max(1.0, float(np.max(np.abs(points)))) if points.shape[0] else 1.0
    merged = []
    for p in points:
        if not merged or np.linalg.norm(p - merged[-1]) > COINCIDENT_TOL * scale:
            merged.append(p)
    if len(merged) > 1 and np.linalg.norm(merged[0] - merged[-1]) <= COINCIDENT_TOL * scale:
        merged.pop()

    changed = True
    while changed and len(merged) > 2:
        changed = False
        for i in range(len(merged)):
            prev, cur, nxt = merged[i - 1], merged[i], merged[(i + 1) % len(merged)]
            a, b = cur - prev, nxt - cur
            norms = np.linalg.norm(a) * np.linalg.norm(b)
            if norms == 0.0 or abs(cross(a, b)) <= COLLINEAR_TOL * norms:
                del merged[i]
                changed = True
                break
    if len(merged) == 2 and np.linalg.norm(merged[0] - merged[1]) <= COINCIDENT_TOL * scale:
        merged.pop()
    return np.array(merged).reshape(-1, 2)


def convex_hull(points):
    """
    Description
    ----------
    Convex hull of a planar point set using the monotone chain algorithm.
    Collinear and repeated points are dropped.

    Parameters
    ----------
    points: array_like
        An (n, 2) array of points.

    Returns
    ----------
    Hull vertices in counterclockwise order, an (m, 2) array with m <= n.
    A single point or a segment is returned for degenerate inputs.
    """
    points = as_points(points)
    pts = np.unique(points, axis=0)
    if pts.shape[0] <= 2:
        return _merge_vertices(pts)

    def build(sequence):
        chain = []
        for p in sequence:
            while len(chain) >= 2:
                a, b = chain[-1] - chain[-2], p - chain[-1]
                norms = np.linalg.norm(a) * np.linalg.norm(b)
                if cross(a, b) <= COLLINEAR_TOL * norms:
                    chain.pop()
                else:
                    break
            chain.append(p)
        return chain

    lower = build(pts)
    upper = build(pts[::-1])
    hull = np.array(lower[:-1] + upper[:-1])
    return _merge_vertices(hull)


class Polygon(object):
    """Closed convex polygon with counterclockwise vertices."""

    kind = "polygon"

    def __init__(self, vertices):
        """
        Description
        ----------
        Convex polygon. Clockwise input is reoriented, repeated and
        collinear vertices are merged. One or two remaining vertices give a
        point or a segment.

        Parameters
        ----------
        vertices: array_like
            An (n, 2) array of vertices in boundary order.

        Returns
        ----------
        Polygon object
        """
        vertices = as_points(vertices)
        if vertices.shape[0] == 0:
            raise DomainError("Polygon requires at least one vertex.")
        if vertices.shape[0] >= 3:
            area = _signed_area(vertices)
            extent = float(np.max(np.ptp(vertices, axis=0)))
            if abs(area) <= COLLINEAR_TOL * extent * extent:
                # collinear input: keep the two extreme points
                vertices = convex_hull(vertices)
            elif area < 0.0:
                vertices = vertices[::-1]
        vertices = _merge_vertices(vertices)
        if vertices.shape[0] >= 3:
            edges = np.roll(vertices, -1, axis=0) - vertices
            turns = edges[:, 0] * np.roll(edges, -1, axis=0)[:, 1] - edges[:, 1] * np.roll(edges, -1, axis=0)[:, 0]
            if np.any(turns <= 0.0):
                raise DomainError("Polygon vertices must describe a convex polygon.")
        self.vertices = vertices

    @classmethod
    def hull(cls, points):
        """Polygon spanned by the convex hull of points."""
        return cls(convex_hull(points))

    @property
    def edges(self):
        """Edge start and end points, each an (m, 2) array."""
        return self.vertices, np.roll(self.vertices, -1, axis=0)

    @property
    def area(self):
        if self.vertices.shape[0] < 3:
            return 0.0
        return _signed_area(self.vertices)

    def inward_normals(self):
        """Unit inward normals of the edges (counterclockwise boundary)."""
        start, end = self.edges
        direction = end - start
        normals = np.stack([-direction[:, 1], direction[:, 0]], axis=1)
        return normals / np.linalg.norm(normals, axis=1).reshape(-1, 1)

    def farthest_distance(self, point):
        point = as_vec2(point)
        return float(np.max(np.linalg.norm(self.vertices - point, axis=1)))

    def to_record(self):
        return {"type": self.kind, "vertices": self.vertices.tolist()}

    def __repr__(self):
        return "Polygon(vertices={})".format(self.vertices.tolist())


def _signed_area(vertices):
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

# ---------------------------------------------------------------------------------------------------------------------
# Cone Hull
# ---------------------------------------------------------------------------------------------------------------------


class ConeHull(object):
    """Convex hull conv(apex, disk) of a point and a disk."""

    kind = "cone"

    def __init__(self, apex, disk):
        """
        Description
        ----------
        Closed convex cone with apex point and base disk. Internally the set
        is handled as the union of the triangle spanned by the apex and the
        two tangent points, and the base disk.

        Parameters
        ----------
        apex: array_like
            Apex point in meters.
        disk: Disk
            The base disk.

        Returns
        ----------
        ConeHull object
        """
        if not isinstance(disk, Disk):
            raise DomainError("Cone base must be a Disk.")
        self.apex = as_vec2(apex)
        self.disk = disk

    @property
    def apex_inside_disk(self):
        return np.linalg.norm(self.apex - self.disk.center) <= self.disk.radius

    def tangent_points(self):
        """
        Description
        ----------
        Touching points of the two tangent lines from the apex to the base
        disk, right side first. Both equal the apex when the apex lies in
        the disk.

        Returns
        ----------
        Tuple of two length 2 arrays.
        """
        axis = self.disk.center - self.apex
        dist = float(np.linalg.norm(axis))
        radius = self.disk.radius
        if dist <= radius or dist == 0.0:
            return self.apex.copy(), self.apex.copy()
        unit = axis / dist
        half_angle = np.arcsin(radius / dist)
        length = np.sqrt(max(dist * dist - radius * radius, 0.0))
        c, s = np.cos(half_angle), np.sin(half_angle)
        right = self.apex + length * np.array([c * unit[0] + s * unit[1], -s * unit[0] + c * unit[1]])
        left = self.apex + length * np.array([c * unit[0] - s * unit[1], s * unit[0] + c * unit[1]])
        return right, left

    def decomposition(self):
        """The (triangle, disk) pair whose union is the cone."""
        right, left = self.tangent_points()
        return Polygon.hull(np.array([self.apex, right, left])), self.disk

    @property
    def vertices(self):
        right, left = self.tangent_points()
        return np.array([self.apex, right, left])

    def farthest_distance(self, point):
        point = as_vec2(point)
        return max(float(np.linalg.norm(self.apex - point)), self.disk.farthest_distance(point))

    def to_record(self):
        right, left = self.tangent_points()
        return {"type": self.kind, "apex": self.apex.tolist(), "center": self.disk.center.tolist(),
                "radius": self.disk.radius, "tangent_points": [right.tolist(), left.tolist()]}

    def __repr__(self):
        return "ConeHull(apex={}, disk={!r})".format(self.apex.tolist(), self.disk)

# ---------------------------------------------------------------------------------------------------------------------
# Point Chain
# ---------------------------------------------------------------------------------------------------------------------


class PointChain(object):
    """Ordered polyline; the only non-convex set handled by pirouette."""

    kind = "chain"

    def __init__(self, points):
        points = as_points(points)
        if points.shape[0] == 0:
            raise DomainError("Point chain requires at least one point.")
        self.points = points

    @property
    def vertices(self):
        return self.points

    @property
    def segments(self):
        """Segment start and end points; a lone point is a zero-length segment."""
        if self.points.shape[0] == 1:
            return self.points, self.points
        return self.points[:-1], self.points[1:]

    def farthest_distance(self, point):
        point = as_vec2(point)
        return float(np.max(np.linalg.norm(self.points - point, axis=1)))

    def to_record(self):
        return {"type": self.kind, "points": self.points.tolist()}

    def __repr__(self):
        return "PointChain(n={})".format(self.points.shape[0])


CONVEX_SETS = (Disk, Polygon, ConeHull)

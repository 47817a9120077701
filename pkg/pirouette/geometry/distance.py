"""
Distance, depth and containment functions between points and the planar
sets of pirouette.geometry.sets.
"""

import numpy as np

from pirouette.utils import as_vec2, as_points, check_nonnegative, DomainError
from pirouette.geometry.sets import Disk, Polygon, ConeHull, PointChain

np.seterr(over="raise")

# ---------------------------------------------------------------------------------------------------------------------
# Segment Kernels
# ---------------------------------------------------------------------------------------------------------------------


def point_segment_distances(points, start, end):
    """
    Description
    ----------
    Distances between every point and every segment.

    Parameters
    ----------
    points: array_like
        An (n, 2) array of points.
    start: array_like
        An (m, 2) array of segment start points.
    end: array_like
        An (m, 2) array of segment end points.

    Returns
    ----------
    An (n, m) array of distances.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 1, 2)
    start = np.asarray(start, dtype=float).reshape(1, -1, 2)
    end = np.asarray(end, dtype=float).reshape(1, -1, 2)
    direction = end - start
    length2 = np.sum(direction ** 2, axis=2)
    safe = np.where(length2 > 0.0, length2, 1.0)
    t = np.sum((points - start) * direction, axis=2) / safe
    t = np.where(length2 > 0.0, np.clip(t, 0.0, 1.0), 0.0)
    foot = start + t[:, :, None] * direction
    return np.linalg.norm(points - foot, axis=2)


def segment_segment_distances(p0, p1, q0, q1):
    """
    Description
    ----------
    Distances between every segment [p0, p1] and every segment [q0, q1].
    Crossing segments have distance zero.

    Returns
    ----------
    An (n, m) array of distances.
    """
    p0, p1 = np.asarray(p0, dtype=float), np.asarray(p1, dtype=float)
    q0, q1 = np.asarray(q0, dtype=float), np.asarray(q1, dtype=float)
    dist = np.minimum(
        np.minimum(point_segment_distances(p0, q0, q1), point_segment_distances(p1, q0, q1)),
        np.minimum(point_segment_distances(q0, p0, p1).T, point_segment_distances(q1, p0, p1).T))

    r = (p1 - p0).reshape(-1, 1, 2)
    s = (q1 - q0).reshape(1, -1, 2)
    qp = q0.reshape(1, -1, 2) - p0.reshape(-1, 1, 2)

    def orient(u, v):
        return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]

    d1 = orient(r, qp)
    d2 = orient(r, qp + s)
    d3 = orient(s, -qp)
    d4 = orient(s, r - qp)
    crossing = (d1 * d2 < 0.0) & (d3 * d4 < 0.0)
    return np.where(crossing, 0.0, dist)

# ---------------------------------------------------------------------------------------------------------------------
# Point Queries
# ---------------------------------------------------------------------------------------------------------------------


def _polygon_edge_depths(points, polygon):
    """Signed distances of points to each edge line, positive inside."""
    start, _ = polygon.edges
    normals = polygon.inward_normals()
    return np.einsum("ijk,jk->ij", points[:, None, :] - start[None, :, :], normals)


def _points_to_polygon(points, polygon):
    start, end = polygon.edges
    dist = np.min(point_segment_distances(points, start, end), axis=1)
    if polygon.vertices.shape[0] >= 3:
        inside = np.all(_polygon_edge_depths(points, polygon) >= 0.0, axis=1)
        dist = np.where(inside, 0.0, dist)
    return dist


def _points_to_set(points, shape):
    if isinstance(shape, Disk):
        return np.maximum(np.linalg.norm(points - shape.center, axis=1) - shape.radius, 0.0)
    if isinstance(shape, Polygon):
        return _points_to_polygon(points, shape)
    if isinstance(shape, ConeHull):
        triangle, disk = shape.decomposition()
        return np.minimum(_points_to_polygon(points, triangle), _points_to_set(points, disk))
    if isinstance(shape, PointChain):
        start, end = shape.segments
        return np.min(point_segment_distances(points, start, end), axis=1)
    raise DomainError("Unsupported set type {}.".format(type(shape).__name__))


def distance_point_to_set(point, shape):
    """
    Description
    ----------
    Minimum Euclidean distance from a point to a set. Zero for members.
    Cones are measured through their triangle and disk decomposition.

    Parameters
    ----------
    point: array_like
        The query point.
    shape: Disk, Polygon, ConeHull or PointChain
        The target set.

    Returns
    ----------
    Distance in meters.
    """
    return float(_points_to_set(as_vec2(point).reshape(1, 2), shape)[0])


def distances_points_to_set(points, shape):
    """Vectorized distance_point_to_set for an (n, 2) array of points."""
    return _points_to_set(as_points(points), shape)


def signed_depth(point, shape):
    """
    Description
    ----------
    Distance from a point to the complement of a convex set. Positive inside,
    zero on the boundary and minus the set distance outside.

    Parameters
    ----------
    point: array_like
        The query point.
    shape: Disk, Polygon or ConeHull
        A convex set.

    Returns
    ----------
    Signed depth in meters.
    """
    point = as_vec2(point)
    if isinstance(shape, Disk):
        return float(shape.radius - np.linalg.norm(point - shape.center))
    if isinstance(shape, PointChain):
        return -distance_point_to_set(point, shape)

    outside = distance_point_to_set(point, shape)
    if outside > 0.0:
        return -outside

    if isinstance(shape, Polygon):
        if shape.vertices.shape[0] < 3:
            return 0.0
        return float(np.min(_polygon_edge_depths(point.reshape(1, 2), shape)))

    if isinstance(shape, ConeHull):
        disk = shape.disk
        if shape.apex_inside_disk:
            return signed_depth(point, disk)
        axis = disk.center - shape.apex
        dist = np.linalg.norm(axis)
        unit = axis / dist
        right, left = shape.tangent_points()
        depths = []
        for touch in (right, left):
            direction = touch - shape.apex
            norm = np.linalg.norm(direction)
            if norm == 0.0:
                continue
            normal = np.array([-direction[1], direction[0]]) / norm
            if np.dot(normal, disk.center - shape.apex) < 0.0:
                normal = -normal
            depths.append(float(np.dot(normal, point - shape.apex)))
        offset = point - disk.center
        offset_norm = np.linalg.norm(offset)
        if offset_norm == 0.0 or np.dot(offset, unit) >= -disk.radius / dist * offset_norm:
            depths.append(float(disk.radius - offset_norm))
        return min(depths) if depths else 0.0

    raise DomainError("Unsupported set type {}.".format(type(shape).__name__))


def support_min(shape, direction):
    """
    Minimum of the linear functional p -> direction . p over a set.
    """
    direction = as_vec2(direction)
    if isinstance(shape, Disk):
        return float(np.dot(direction, shape.center) - shape.radius * np.linalg.norm(direction))
    if isinstance(shape, ConeHull):
        return min(float(np.dot(direction, shape.apex)), support_min(shape.disk, direction))
    return float(np.min(shape.vertices.dot(direction)))


def depth_in_polygon(shape, polygon):
    """
    Description
    ----------
    Smallest signed depth of any member of shape inside a convex polygon,
    i.e. how far the whole set can be pushed in any direction before leaving
    the polygon. Negative when part of the set lies outside.

    Parameters
    ----------
    shape: Disk, Polygon, ConeHull or PointChain
        The inner set.
    polygon: Polygon
        Convex polygon with at least three vertices.

    Returns
    ----------
    Depth in meters.
    """
    if polygon.vertices.shape[0] < 3:
        raise DomainError("Depth requires a polygon with nonzero area.")
    start, _ = polygon.edges
    normals = polygon.inward_normals()
    return min(support_min(shape, n) - float(np.dot(n, v)) for n, v in zip(normals, start))

# ---------------------------------------------------------------------------------------------------------------------
# Set Queries
# ---------------------------------------------------------------------------------------------------------------------


def _segments_of(shape):
    if isinstance(shape, PointChain):
        return shape.segments
    return shape.edges


def distance_between_sets(alpha, beta):
    """
    Description
    ----------
    Minimum distance between members of two sets. Zero iff they intersect.

    Parameters
    ----------
    alpha: Disk, Polygon, ConeHull or PointChain
        The first set.
    beta: Disk, Polygon, ConeHull or PointChain
        The second set.

    Returns
    ----------
    Distance in meters.
    """
    if isinstance(alpha, Disk):
        return max(distance_point_to_set(alpha.center, beta) - alpha.radius, 0.0)
    if isinstance(beta, Disk):
        return distance_between_sets(beta, alpha)
    if isinstance(alpha, ConeHull):
        triangle, disk = alpha.decomposition()
        return min(distance_between_sets(triangle, beta), distance_between_sets(disk, beta))
    if isinstance(beta, ConeHull):
        return distance_between_sets(beta, alpha)

    for filled, other in ((alpha, beta), (beta, alpha)):
        if isinstance(filled, Polygon) and filled.vertices.shape[0] >= 3:
            if np.any(_points_to_polygon(other.vertices, filled) == 0.0):
                return 0.0
    p0, p1 = _segments_of(alpha)
    q0, q1 = _segments_of(beta)
    return float(np.min(segment_segment_distances(p0, p1, q0, q1)))


def contains_set(outer, inner, tol=0.0):
    """
    Description
    ----------
    Test whether inner is a subset of outer dilated by tol.

    Parameters
    ----------
    outer: Disk, Polygon, ConeHull or PointChain
        The containing set.
    inner: Disk, Polygon, ConeHull or PointChain
        The contained set.
    tol: Float
        Dilation of outer in meters.

    Returns
    ----------
    Boolean
    """
    tol = check_nonnegative(tol, "Tolerance")
    if isinstance(inner, ConeHull):
        return (contains_set(outer, Disk(inner.apex, 0.0), tol)
                and contains_set(outer, inner.disk, tol))
    if isinstance(inner, Disk):
        if isinstance(outer, PointChain):
            return distance_point_to_set(inner.center, outer) + inner.radius <= tol
        return signed_depth(inner.center, outer) >= inner.radius - tol
    # polygons and chains: vertex containment suffices for convex outer sets
    return bool(np.all(distances_points_to_set(inner.vertices, outer) <= tol))

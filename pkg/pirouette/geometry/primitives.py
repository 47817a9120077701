"""
Planar primitives: angle wrapping, rotations and the heading / normal
directions of a unicycle orientation.
"""

import numpy as np

from pirouette.utils import as_vec2, DomainError

np.seterr(over="raise")

TWO_PI = 2.0 * np.pi

# ---------------------------------------------------------------------------------------------------------------------
# Angles
# ---------------------------------------------------------------------------------------------------------------------


def wrap_angle(theta):
    """
    Description
    ----------
    Map an angle (or array of angles) onto the canonical interval [-pi, pi).

    Parameters
    ----------
    theta: float or array_like
        Angle in radians.

    Returns
    ----------
    The equivalent angle in [-pi, pi).
    """
    wrapped = np.mod(np.asarray(theta, dtype=float) + np.pi, TWO_PI) - np.pi
    # mod can round up to exactly 2*pi for tiny negative inputs
    wrapped = np.where(wrapped >= np.pi, wrapped - TWO_PI, wrapped)
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped


def rotation_matrix(theta):
    """
    The 2D counterclockwise rotation matrix R(theta).
    """
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def rotate(theta, vec):
    """
    Description
    ----------
    Rotate a planar vector counterclockwise by theta.

    Parameters
    ----------
    theta: float
        Rotation angle in radians.
    vec: array_like
        The vector to rotate.

    Returns
    ----------
    R(theta) vec as a length 2 array.
    """
    vec = as_vec2(vec)
    c, s = np.cos(theta), np.sin(theta)
    return np.array([c * vec[0] - s * vec[1], s * vec[0] + c * vec[1]])


def heading_vector(theta):
    """Unit vector o_theta = (cos theta, sin theta)."""
    return np.array([np.cos(theta), np.sin(theta)])


def normal_vector(theta):
    """Unit vector n_theta = R(pi/2) o_theta = (-sin theta, cos theta)."""
    return np.array([-np.sin(theta), np.cos(theta)])


def cross(u, v):
    """Scalar z-component of the planar cross product u x v."""
    return u[0] * v[1] - u[1] * v[0]


def angle_between(u, v):
    """
    Description
    ----------
    Signed counterclockwise angle from u to v.

    Parameters
    ----------
    u: array_like
        Nonzero reference vector.
    v: array_like
        Nonzero target vector.

    Returns
    ----------
    Angle in radians in [-pi, pi).
    """
    u, v = as_vec2(u), as_vec2(v)
    if not np.any(u) or not np.any(v):
        raise DomainError("Angle between vectors is undefined for a zero vector.")
    return wrap_angle(np.arctan2(cross(u, v), np.dot(u, v)))


def reflect_across_line(point, a, b):
    """
    Mirror a point across the line through a and b. Returns the point
    unchanged when a == b.
    """
    point, a, b = as_vec2(point), as_vec2(a), as_vec2(b)
    direction = b - a
    length2 = np.dot(direction, direction)
    if length2 == 0.0:
        return point
    foot = a + np.dot(point - a, direction) / length2 * direction
    return 2.0 * foot - point

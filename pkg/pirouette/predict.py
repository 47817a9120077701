"""
This script contains code for feedback motion prediction: sets that are
guaranteed to contain the whole future closed-loop unicycle trajectory
towards a goal, their characteristic points and distance queries.
"""

import logging
import collections
import functools
import numpy as np

from pirouette.utils import as_vec2, check_positive, DomainError, PreconditionError
from pirouette.geometry.primitives import rotate
from pirouette.geometry.sets import Disk, Polygon, ConeHull, PointChain
from pirouette.geometry.distance import distance_point_to_set, contains_set
from pirouette.unicycle import (UnicycleState, ControlGains, BIDIRECTIONAL, BACKWARD, HALF_PI, check_mode,
                                heading_error, mode_heading_error)
from pirouette.turning import sine_integral, SI_PI
from pirouette.simulate import IntegratorSettings, simulate_to_goal

logger = logging.getLogger(__name__)

np.seterr(over="raise")

BALL = "ball"
CONE = "cone"
DIAMOND = "diamond"
REACHABLE = "reachable"
TRIANGLE = "triangle"
METHODS = (BALL, CONE, DIAMOND, REACHABLE)
# every method contains the one before it
INCLUSION_ORDER = (REACHABLE, DIAMOND, CONE, BALL)

# heading errors below this magnitude use the straight-line limit
PSI_EPS = 1e-9

CharacteristicPoints = collections.namedtuple(
    "CharacteristicPoints",
    ["projected_goal", "projected_goal_reflection", "intersection", "intersection_reflection"])


def check_method(method, allow_triangle=False):
    if method in METHODS or (allow_triangle and method == TRIANGLE):
        return method
    raise DomainError("Invalid prediction method argument {!r}; expected one of {}.".format(method, METHODS))


def _check_spiral_free(gains):
    if not gains.spiral_free:
        raise PreconditionError(
            "Diamond requires kv <= kw: the heading lines only intersect without spiral circulation "
            "(got kv={}, kw={}).".format(gains.kv, gains.kw))

# ---------------------------------------------------------------------------------------------------------------------
# Characteristic Points
# ---------------------------------------------------------------------------------------------------------------------


def projected_goal(state, goal):
    """
    Description
    ----------
    Perpendicular projection of the goal onto the heading line and its
    mirror image across the line through the position and the goal.

    Parameters
    ----------
    state: UnicycleState
        Current unicycle state.
    goal: array_like
        Goal position.

    Returns
    ----------
    Tuple (p, p_reflection) of length 2 arrays.
    """
    offset = as_vec2(goal) - state.position
    psi = heading_error(state, goal)
    scale = np.cos(psi)
    return state.position + scale * rotate(-psi, offset), state.position + scale * rotate(psi, offset)


def heading_line_intersection(state, goal, gains):
    """
    Description
    ----------
    Intersection of the initial heading line with the final heading line
    through the goal, and its mirror image across the line through the
    position and the goal.

    Parameters
    ----------
    state: UnicycleState
        Current unicycle state.
    goal: array_like
        Goal position.
    gains: ControlGains
        Control gains with kv <= kw.

    Returns
    ----------
    Tuple (x_star, x_star_reflection) of length 2 arrays.
    """
    _check_spiral_free(gains)
    goal = as_vec2(goal)
    offset = goal - state.position
    if not np.any(offset):
        return state.position.copy(), state.position.copy()
    psi = heading_error(state, goal)
    if abs(psi) < PSI_EPS:
        point = state.position + straight_limit_ratio(gains) * offset
        return point, point.copy()
    si = sine_integral(2.0 * psi)
    total = psi + gains.ratio * si
    factor = np.sin(-gains.ratio * si) / np.sin(total)
    return state.position - factor * rotate(-psi, offset), state.position - factor * rotate(psi, offset)


def heading_line_intersection_alt(state, goal, gains):
    """
    Intersection of the initial and final heading lines computed directly
    from the final orientation, x + (n* . (g - x) / n* . o) o.
    """
    _check_spiral_free(gains)
    goal = as_vec2(goal)
    offset = goal - state.position
    psi = heading_error(state, goal)
    if not np.any(offset) or abs(psi) < PSI_EPS:
        return state.position + straight_limit_ratio(gains) * offset
    theta_final = state.orientation + psi + gains.ratio * sine_integral(2.0 * psi)
    heading = np.array([np.cos(state.orientation), np.sin(state.orientation)])
    normal = np.array([-np.sin(theta_final), np.cos(theta_final)])
    return state.position + np.dot(normal, offset) / np.dot(normal, heading) * heading


def straight_limit_ratio(gains):
    """Position of the intersection along [x, g] as the heading error vanishes."""
    rate = gains.kv / gains.kw
    return rate / (1.0 + rate)


def directional_boundary_points(state, goal, gains):
    """
    Description
    ----------
    Outer vertices of the directional diamond when the goal lies outside
    the moving half plane. The unicycle first turns in place and then
    leaves with the goal exactly abeam.

    Parameters
    ----------
    state: UnicycleState
        Current unicycle state.
    goal: array_like
        Goal position.
    gains: ControlGains
        Control gains with kv <= kw.

    Returns
    ----------
    Tuple of length 2 arrays x + tan(c) R(-pi/2)(g - x) and
    x + tan(c) R(pi/2)(g - x) with c = (kv / 2kw) Si(pi).
    """
    _check_spiral_free(gains)
    offset = as_vec2(goal) - state.position
    scale = np.tan(gains.ratio * SI_PI)
    return state.position + scale * rotate(-HALF_PI, offset), state.position + scale * rotate(HALF_PI, offset)


def characteristic_points(state, goal, gains):
    """Projected goal and heading line intersection points with their reflections."""
    p, p_reflection = projected_goal(state, goal)
    x_star, x_star_reflection = heading_line_intersection(state, goal, gains)
    return CharacteristicPoints(p, p_reflection, x_star, x_star_reflection)

# ---------------------------------------------------------------------------------------------------------------------
# Motion Prediction Sets
# ---------------------------------------------------------------------------------------------------------------------


class MotionPrediction(object):
    """A set containing the future closed-loop motion towards a goal."""

    def __init__(self, method, body, goal, state, mode=BIDIRECTIONAL, margin=0.0):
        """
        Description
        ----------
        Prediction set with its provenance.

        Parameters
        ----------
        method: String
            The prediction method that built the set.
        body: Disk, Polygon, ConeHull or PointChain
            The set itself.
        goal: array_like
            The goal position.
        state: UnicycleState
            The state the prediction starts from.
        mode: String
            Steering mode.
        margin: Float
            Known approximation error of the body in meters. Distance
            queries by the governor subtract it.

        Returns
        ----------
        MotionPrediction object
        """
        self.method = method
        self.body = body
        self.goal = as_vec2(goal)
        self.state = state
        self.mode = mode
        self.margin = float(margin)

    def distance(self, point):
        return distance_to_prediction(point, self)

    def contains(self, other, tol=0.0):
        """True when the other prediction lies inside this one dilated by tol."""
        return contains_set(self.body, other.body, tol)

    @property
    def radius(self):
        return prediction_radius_about_goal(self)

    def to_record(self):
        record = {"method": self.method, "mode": self.mode, "goal": self.goal.tolist(),
                  "state": self.state.as_array().tolist(), "set": self.body.to_record()}
        if self.margin:
            record["margin"] = self.margin
        return record

    def __repr__(self):
        return "MotionPrediction(method={}, body={!r})".format(self.method, self.body)


def ball(state, goal):
    """Disk centered at the goal through the current position."""
    goal = as_vec2(goal)
    return Disk(goal, float(np.linalg.norm(goal - state.position)))


def cone(state, goal):
    """Cone hull of the position and the goal disk of radius sin|psi| |x - g|."""
    goal = as_vec2(goal)
    dist = float(np.linalg.norm(goal - state.position))
    return ConeHull(state.position, Disk(goal, abs(np.sin(heading_error(state, goal))) * dist))


def cone_decomposition(state, goal):
    """The (triangle, disk) pair whose union is the cone prediction."""
    return cone(state, goal).decomposition()


def diamond(state, goal, gains):
    """Convex hull of the position, the goal and both heading line intersections."""
    goal = as_vec2(goal)
    x_star, x_star_reflection = heading_line_intersection(state, goal, gains)
    return Polygon.hull(np.array([state.position, goal, x_star, x_star_reflection]))


def triangular_bound(state, goal, gains):
    """
    Triangle spanned by the position, the goal and the heading line
    intersection. Tighter than the diamond but not symmetric about [x, g].
    """
    goal = as_vec2(goal)
    x_star, _ = heading_line_intersection(state, goal, gains)
    return Polygon.hull(np.array([state.position, goal, x_star]))


def reachable_chain(state, goal, gains, mode=BIDIRECTIONAL, settings=None):
    """
    Simulated closed-loop positions until the goal tolerance, with the goal
    appended.
    """
    goal = as_vec2(goal)
    trajectory = simulate_to_goal(state, goal, gains, mode, settings)
    if trajectory.truncated:
        logger.warning("Forward reachable chain truncated at max_time; the set may miss the tail.")
    return PointChain(np.vstack([trajectory.positions, goal]))


def _outside_moving_half_plane(state, goal, mode):
    return mode != BIDIRECTIONAL and abs(mode_heading_error(state, goal, mode)) > HALF_PI


def predict(state, goal, gains, method, mode=BIDIRECTIONAL, settings=None, reachable=None):
    """
    Description
    ----------
    Build a feedback motion prediction of the closed-loop unicycle motion
    towards a goal.

    Parameters
    ----------
    state: UnicycleState
        Current unicycle state.
    goal: array_like
        Goal position.
    gains: ControlGains
        Control gains. The diamond requires kv <= kw.
    method: String
        One of "ball", "cone", "diamond", "reachable" (or "triangle" for
        the bidirectional triangular bound).
    mode: String
        Steering mode, one of "bi", "fwd", "bwd".
    settings: IntegratorSettings
        Integrator settings of the forward reachable simulation.
    reachable: ReachableCache
        When given, forward reachable chains come from the cache instead
        of a fresh simulation.

    Returns
    ----------
    MotionPrediction
    """
    check_method(method, allow_triangle=True)
    check_mode(mode)
    goal = as_vec2(goal)
    if not np.any(goal - state.position):
        return MotionPrediction(method, _degenerate(method, goal), goal, state, mode)

    if method == REACHABLE:
        if reachable is not None:
            body, margin = reachable.chain(state, goal, gains, mode)
            return MotionPrediction(method, body, goal, state, mode, margin=margin)
        return MotionPrediction(method, reachable_chain(state, goal, gains, mode, settings), goal, state, mode)

    if method == BALL:
        body = ball(state, goal)
    elif _outside_moving_half_plane(state, goal, mode):
        if method == CONE:
            body = ball(state, goal)
        else:
            x_bar, x_bar_reflection = directional_boundary_points(state, goal, gains)
            body = Polygon.hull(np.array([goal, x_bar, x_bar_reflection]))
    elif method == CONE:
        body = cone(state, goal)
    elif method == DIAMOND:
        body = diamond(state, goal, gains)
    else:
        body = triangular_bound(state, goal, gains)
    return MotionPrediction(method, body, goal, state, mode)


def _degenerate(method, goal):
    if method == BALL:
        return Disk(goal, 0.0)
    if method == CONE:
        return ConeHull(goal, Disk(goal, 0.0))
    if method == REACHABLE:
        return PointChain(goal.reshape(1, 2))
    return Polygon(goal.reshape(1, 2))


def distance_to_prediction(point, prediction):
    """
    Distance from a point to a prediction set, zero inside. Cones are
    measured as the union of their triangle and disk.
    """
    return distance_point_to_set(point, prediction.body)


def prediction_radius_about_goal(prediction):
    """Largest distance from the goal to any member of the prediction set."""
    return prediction.body.farthest_distance(prediction.goal)

# ---------------------------------------------------------------------------------------------------------------------
# Cached Forward Reachable Chains
# ---------------------------------------------------------------------------------------------------------------------


class ReachableCache(object):
    """Forward reachable chains from a cache of canonical trajectories."""

    def __init__(self, resolution=2e-3, max_samples=200, margin_factor=2.0, settings=None):
        """
        Description
        ----------
        The closed loop commutes with rigid motions and scalings about the
        goal, so the trajectory shape depends only on the heading error,
        the steering mode and kv / kw. Chains are simulated once on a
        heading error grid in the frame x = (0, 0), g = (1, 0) and mapped
        into place.

        Parameters
        ----------
        resolution: Float
            Heading error grid spacing in radians.
        max_samples: int
            Chains are resampled by arc length to at most this many points.
        margin_factor: Float
            The chain margin is margin_factor * resolution * |x - g|,
            covering the heading error rounding.
        settings: IntegratorSettings
            Settings of the canonical simulations.

        Returns
        ----------
        ReachableCache object
        """
        self.resolution = check_positive(resolution, "Resolution")
        if not isinstance(max_samples, int) or max_samples < 2:
            raise DomainError("Max samples parameter must be an integer of at least 2.")
        self.max_samples = max_samples
        self.margin_factor = check_positive(margin_factor, "Margin factor")
        self.settings = settings or IntegratorSettings(rel_tol=1e-8, abs_tol=1e-10, max_step=0.05, goal_eps=1e-4)
        self._canonical = functools.lru_cache(maxsize=4096)(self._simulate_canonical)

    def _simulate_canonical(self, mode, index, kv, kw):
        psi = index * self.resolution
        # heading error psi at x = (0, 0) with goal (1, 0) (backward mode looks along -o)
        theta = np.pi - psi if mode == BACKWARD else -psi
        trajectory = simulate_to_goal(UnicycleState([0.0, 0.0], theta), [1.0, 0.0], ControlGains(kv, kw),
                                      mode, self.settings)
        points = np.vstack([trajectory.positions, [1.0, 0.0]])
        return _resample(points, self.max_samples)

    def chain(self, state, goal, gains, mode=BIDIRECTIONAL):
        """
        Description
        ----------
        Cached forward reachable chain of a state.

        Returns
        ----------
        Tuple (PointChain, margin in meters).
        """
        goal = as_vec2(goal)
        offset = goal - state.position
        dist = float(np.linalg.norm(offset))
        psi = mode_heading_error(state, goal, mode)
        index = int(round(abs(psi) / self.resolution))
        points = self._canonical(mode, index, gains.kv, gains.kw)
        if psi < 0.0:
            points = points * np.array([1.0, -1.0])
        angle = np.arctan2(offset[1], offset[0])
        c, s = np.cos(angle), np.sin(angle)
        placed = state.position + dist * points.dot(np.array([[c, s], [-s, c]]))
        return PointChain(placed), self.margin_factor * self.resolution * dist

    def cache_info(self):
        return self._canonical.cache_info()

    def __getstate__(self):
        state = self.__dict__.copy()
        del state["_canonical"]
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._canonical = functools.lru_cache(maxsize=4096)(self._simulate_canonical)

    def to_record(self):
        return {"resolution": self.resolution, "max_samples": self.max_samples,
                "margin_factor": self.margin_factor}


def _resample(points, max_samples):
    """Keep at most max_samples points, evenly spaced by arc length, ends included."""
    if points.shape[0] <= max_samples:
        return points
    arc = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(points, axis=0), axis=1))])
    targets = np.linspace(0.0, arc[-1], max_samples)
    index = np.unique(np.clip(np.searchsorted(arc, targets), 0, points.shape[0] - 1))
    index = np.unique(np.concatenate([[0], index, [points.shape[0] - 1]]))
    return points[index]

"""
This script contains code for safe path following with a time governor:
the world and free space model, reference paths, the distance of a motion
prediction to the free space boundary and the governed closed loop.
"""

import logging
import collections
import numpy as np

from pirouette.utils import as_points, check_positive, check_nonnegative, DomainError, PreconditionError, ValidationError
from pirouette.geometry.sets import Disk, Polygon
from pirouette.geometry.distance import (distance_point_to_set, distance_between_sets, signed_depth,
                                         depth_in_polygon)
from pirouette.unicycle import UnicycleState, BIDIRECTIONAL, check_mode, controller, mode_heading_error
from pirouette.predict import REACHABLE, ReachableCache, check_method, predict
from pirouette.simulate import IntegratorSettings, integrate

logger = logging.getLogger(__name__)

np.seterr(over="raise")

# largest step of the governed integration
FOLLOW_MAX_STEP = 0.05
# the path parameter counts as complete this close to smax
S_TOL = 1e-4

GovernedRate = collections.namedtuple("GovernedRate", ["ds", "dx", "dtheta"])

# ---------------------------------------------------------------------------------------------------------------------
# World and Path
# ---------------------------------------------------------------------------------------------------------------------


class World(object):
    """Known static environment of a disk-shaped robot."""

    def __init__(self, workspace, obstacles=(), robot_radius=0.0):
        """
        Description
        ----------
        Bounded convex workspace with convex obstacles. The free space is
        the set of positions where the robot disk fits inside the
        workspace without touching an obstacle.

        Parameters
        ----------
        workspace: Polygon
            Convex workspace polygon with nonzero area.
        obstacles: list
            Disk and Polygon obstacles.
        robot_radius: Float
            Robot body radius in meters.

        Returns
        ----------
        World object
        """
        if not isinstance(workspace, Polygon) or workspace.vertices.shape[0] < 3:
            raise DomainError("Workspace must be a convex polygon with nonzero area.")
        for obstacle in obstacles:
            if not isinstance(obstacle, (Disk, Polygon)):
                raise DomainError("Obstacles must be disks or convex polygons.")
        self.workspace = workspace
        self.obstacles = list(obstacles)
        self.robot_radius = check_nonnegative(robot_radius, "Robot radius")

    def clearance(self, position):
        return robot_clearance(self, position)

    def to_record(self):
        return {"workspace": self.workspace.vertices.tolist(),
                "obstacles": [o.to_record() for o in self.obstacles],
                "robot_radius": self.robot_radius}

    def __repr__(self):
        return "World(obstacles={}, robot_radius={})".format(len(self.obstacles), self.robot_radius)


class ReferencePath(object):
    """Piecewise linear path parametrized by arc length."""

    def __init__(self, waypoints):
        """
        Description
        ----------
        Polyline through the waypoints. Repeated consecutive waypoints are
        dropped.

        Parameters
        ----------
        waypoints: array_like
            An (n, 2) array of waypoints.

        Returns
        ----------
        ReferencePath object
        """
        waypoints = as_points(waypoints)
        keep = np.concatenate([[True], np.any(np.diff(waypoints, axis=0) != 0.0, axis=1)])
        self.waypoints = waypoints[keep]
        if self.waypoints.shape[0] < 2:
            raise ValidationError("Reference path requires at least two distinct waypoints.")
        self.arc_lengths = np.concatenate(
            [[0.0], np.cumsum(np.linalg.norm(np.diff(self.waypoints, axis=0), axis=1))])

    @property
    def smin(self):
        return 0.0

    @property
    def smax(self):
        return float(self.arc_lengths[-1])

    @property
    def length(self):
        return self.smax

    def locate(self, s):
        """
        Description
        ----------
        Path point at arc length s.

        Parameters
        ----------
        s: Float
            Arc length. Values outside [smin, smax] are clamped.

        Returns
        ----------
        Tuple (point, clamped).
        """
        clamped = s < self.smin or s > self.smax
        s = min(max(float(s), self.smin), self.smax)
        i = int(np.clip(np.searchsorted(self.arc_lengths, s, side="right") - 1, 0, self.waypoints.shape[0] - 2))
        span = self.arc_lengths[i + 1] - self.arc_lengths[i]
        fraction = (s - self.arc_lengths[i]) / span
        return self.waypoints[i] + fraction * (self.waypoints[i + 1] - self.waypoints[i]), clamped

    def sample(self, step_fraction=0.01):
        """Path points every step_fraction * length plus every waypoint."""
        step_fraction = check_positive(step_fraction, "Step fraction")
        grid = np.arange(0.0, self.smax, step_fraction * self.smax)
        points = np.array([self.locate(s)[0] for s in grid])
        return np.vstack([points, self.waypoints])

    def to_record(self):
        return {"waypoints": self.waypoints.tolist(), "length": self.length}

    def __repr__(self):
        return "ReferencePath(waypoints={}, length={:.4f})".format(self.waypoints.shape[0], self.length)


def path_point(path, s):
    """Point at arc length s, clamped to the path ends."""
    point, clamped = path.locate(s)
    if clamped:
        logger.debug("Path parameter %.6f clamped to [%.6f, %.6f].", s, path.smin, path.smax)
    return point


class GovernorGains(object):
    """Gains of the time governor."""

    def __init__(self, k_eps=4.0, k_s=4.0):
        """
        Description
        ----------
        Positive gains of the path parameter dynamics
        ds = min(k_eps * safedist, -k_s (s - smax)).

        Parameters
        ----------
        k_eps: Float
            Clearance gain in 1/s.
        k_s: Float
            Convergence gain in 1/s.

        Returns
        ----------
        GovernorGains object
        """
        self.k_eps = check_positive(k_eps, "Clearance gain")
        self.k_s = check_positive(k_s, "Convergence gain")

    def to_record(self):
        return {"k_eps": self.k_eps, "k_s": self.k_s}

    def __repr__(self):
        return "GovernorGains(k_eps={}, k_s={})".format(self.k_eps, self.k_s)


class GovernedState(object):
    """Path parameter and unicycle state of the governed system."""

    def __init__(self, s, robot):
        self.s = float(s)
        self.robot = robot

    @classmethod
    def from_array(cls, arr):
        """Build from an (s, x, y, theta) array."""
        return cls(arr[0], UnicycleState(arr[1:3], arr[3]))

    def as_array(self):
        return np.concatenate([[self.s], self.robot.as_array()])

    def __repr__(self):
        return "GovernedState(s={}, robot={!r})".format(self.s, self.robot)

# ---------------------------------------------------------------------------------------------------------------------
# Free Space Distances
# ---------------------------------------------------------------------------------------------------------------------


def workspace_slack(world, shape):
    """How far a set lies inside the workspace shrunk by the robot radius."""
    return depth_in_polygon(shape, world.workspace) - world.robot_radius


def robot_clearance(world, position):
    """
    Description
    ----------
    Distance of the robot disk to the obstacles and the workspace boundary.
    Negative when the disk overlaps an obstacle or leaves the workspace.

    Parameters
    ----------
    world: World
        The environment.
    position: array_like
        Robot position.

    Returns
    ----------
    Clearance in meters.
    """
    clearance = signed_depth(position, world.workspace) - world.robot_radius
    for obstacle in world.obstacles:
        clearance = min(clearance, distance_point_to_set(position, obstacle) - world.robot_radius)
    return float(clearance)


def free_space_distance(world, prediction):
    """
    Description
    ----------
    Distance between a motion prediction and the free space boundary, zero
    when the prediction leaves the free space. Obstacles are inflated and
    the workspace deflated by the robot radius.

    Parameters
    ----------
    world: World
        The environment.
    prediction: MotionPrediction
        The motion prediction. Its margin is subtracted.

    Returns
    ----------
    Nonnegative distance in meters.
    """
    body = prediction.body
    slack = workspace_slack(world, body)
    if slack < 0.0:
        return 0.0
    distance = slack
    for obstacle in world.obstacles:
        gap = distance_between_sets(body, obstacle) - world.robot_radius
        if gap <= 0.0:
            return 0.0
        distance = min(distance, gap)
    return max(float(distance - prediction.margin), 0.0)


def validate_path(world, path, step_fraction=0.01):
    """
    Description
    ----------
    Check that the reference path keeps a positive clearance from the free
    space boundary, sampled every step_fraction of its length and at every
    waypoint.

    Parameters
    ----------
    world: World
        The environment.
    path: ReferencePath
        The reference path.
    step_fraction: Float
        Sample spacing as a fraction of the path length.

    Returns
    ----------
    The smallest sampled clearance.
    """
    samples = path.sample(step_fraction)
    clearances = np.array([robot_clearance(world, p) for p in samples])
    worst = int(np.argmin(clearances))
    if clearances[worst] <= 0.0:
        logger.warning("Reference path leaves the free space at %s.", samples[worst].tolist())
        raise ValidationError("Reference path leaves the free space at {} (clearance {:.3e}).".format(
            np.round(samples[worst], 6).tolist(), clearances[worst]))
    return float(clearances[worst])

# ---------------------------------------------------------------------------------------------------------------------
# Governed Closed Loop
# ---------------------------------------------------------------------------------------------------------------------


def safedist(gstate, world, path, gains, method, mode=BIDIRECTIONAL, settings=None, reachable=None):
    """Free space distance of the motion prediction towards the current path point."""
    goal = path_point(path, gstate.s)
    prediction = predict(gstate.robot, goal, gains, method, mode, settings=settings, reachable=reachable)
    return free_space_distance(world, prediction)


def _rates(gstate, world, path, gains, ggains, method, mode, settings, reachable):
    goal = path_point(path, gstate.s)
    prediction = predict(gstate.robot, goal, gains, method, mode, settings=settings, reachable=reachable)
    distance = free_space_distance(world, prediction)
    ds = min(ggains.k_eps * distance, -ggains.k_s * (gstate.s - path.smax))
    control = controller(mode)(gstate.robot, goal, gains)
    theta = gstate.robot.orientation
    rate = GovernedRate(ds, control.v * np.array([np.cos(theta), np.sin(theta)]), control.w)
    return rate, distance


def governed_derivative(gstate, world, path, gains, ggains, method, mode=BIDIRECTIONAL, settings=None,
                        reachable=None):
    """
    Description
    ----------
    Rates of the governed system. The path parameter advances as fast as
    the clearance of the motion prediction towards the current path point
    allows, and the unicycle steers towards that point.

    Parameters
    ----------
    gstate: GovernedState
        Path parameter and unicycle state.
    world: World
        The environment.
    path: ReferencePath
        The reference path.
    gains: ControlGains
        Unicycle control gains.
    ggains: GovernorGains
        Governor gains.
    method: String
        Prediction method.
    mode: String
        Steering mode.
    settings: IntegratorSettings
        Settings of uncached forward reachable simulations.
    reachable: ReachableCache
        Cache of forward reachable chains.

    Returns
    ----------
    GovernedRate(ds, dx, dtheta)
    """
    rate, _ = _rates(gstate, world, path, gains, ggains, method, mode, settings, reachable)
    return rate


class FollowResult(object):
    """Samples and summary of a governed path following run."""

    def __init__(self, t, states, inputs, goals, safedists, clearances, path, method, mode,
                 reached, truncated, stalled, reachable=None):
        self.t = np.asarray(t, dtype=float)
        self.s = states[:, 0]
        self.positions = states[:, 1:3]
        self.orientations = states[:, 3]
        self.inputs = np.asarray(inputs, dtype=float).reshape(-1, 2)
        self.goals = np.asarray(goals, dtype=float).reshape(-1, 2)
        self.safedist = np.asarray(safedists, dtype=float)
        self.clearance = np.asarray(clearances, dtype=float)
        self.method = method
        self.mode = mode
        self.reached = reached
        self.truncated = truncated
        self.stalled = stalled
        self.reachable = reachable
        self.psi = np.array([mode_heading_error(UnicycleState(p, th), g, mode)
                             for p, th, g in zip(self.positions, self.orientations, self.goals)])
        self.dist = np.linalg.norm(self.goals - self.positions, axis=1)
        self.terminal_error = float(np.linalg.norm(self.positions[-1] - path.waypoints[-1]))

    @property
    def travel_time(self):
        return float(self.t[-1])

    @property
    def min_clearance(self):
        return float(np.min(self.clearance))

    @property
    def speed(self):
        return np.abs(self.inputs[:, 0])

    @property
    def distance_travelled(self):
        return float(np.sum(np.linalg.norm(np.diff(self.positions, axis=0), axis=1)))

    @property
    def average_speed(self):
        if self.travel_time == 0.0:
            return 0.0
        return self.distance_travelled / self.travel_time

    def as_columns(self):
        """Samples as an (n, 10) array in the data file column order."""
        return np.column_stack([self.t, self.positions, self.orientations, self.inputs, self.psi,
                                self.dist, self.safedist, self.s])

    def summary(self):
        record = {"method": self.method, "mode": self.mode, "travel_time": self.travel_time,
                  "average_speed": self.average_speed, "min_clearance": self.min_clearance,
                  "terminal_error": self.terminal_error, "final_s": float(self.s[-1]),
                  "reached": self.reached, "truncated": self.truncated, "stalled": self.stalled,
                  "samples": int(self.t.shape[0])}
        if self.reachable is not None:
            record["reachable"] = self.reachable.to_record()
        return record

    def __repr__(self):
        return "FollowResult(method={}, travel_time={:.3f}, reached={})".format(
            self.method, self.travel_time, self.reached)


def longest_stall(t, ds):
    """Longest time span over which consecutive samples have ds == 0."""
    longest, start = 0.0, None
    for ti, rate in zip(t, ds):
        if rate <= 0.0:
            start = ti if start is None else start
            longest = max(longest, ti - start)
        else:
            start = None
    return longest


def follow_path(world, path, initial, gains, ggains, method, mode=BIDIRECTIONAL, settings=None,
                reachable=None, stall_window=5.0, position_tol=1e-3):
    """
    Description
    ----------
    Integrate the governed path following system from the start of the
    path until the path parameter reaches its end and the robot reaches the
    last waypoint, or max_time passes.

    Parameters
    ----------
    world: World
        The environment.
    path: ReferencePath
        The reference path.
    initial: UnicycleState
        Initial robot state, located at the first waypoint.
    gains: ControlGains
        Unicycle control gains.
    ggains: GovernorGains
        Governor gains.
    method: String
        Prediction method, one of "ball", "cone", "diamond", "reachable".
    mode: String
        Steering mode.
    settings: IntegratorSettings
        Integrator settings. The step is capped at FOLLOW_MAX_STEP.
    reachable: ReachableCache
        Cache for forward reachable chains. A default cache is created for
        the "reachable" method.
    stall_window: Float
        A run is flagged as stalled when the path parameter stays frozen
        for longer than this many seconds.
    position_tol: Float
        Terminal distance to the last waypoint in meters.

    Returns
    ----------
    FollowResult
    """
    check_method(method)
    check_mode(mode)
    stall_window = check_positive(stall_window, "Stall window")
    position_tol = check_positive(position_tol, "Position tolerance")
    start = path.waypoints[0]
    if np.linalg.norm(initial.position - start) > 1e-9 * max(1.0, path.length):
        raise PreconditionError("Path following must start at the first waypoint {}.".format(start.tolist()))
    if method == REACHABLE and reachable is None:
        reachable = ReachableCache()
    settings = settings or IntegratorSettings()
    settings = settings.replace(max_step=min(settings.max_step, FOLLOW_MAX_STEP))
    end = path.waypoints[-1]

    def dynamics(t, y):
        rate, _ = _rates(GovernedState.from_array(y), world, path, gains, ggains, method, mode, settings, reachable)
        return np.array([rate.ds, rate.dx[0], rate.dx[1], rate.dtheta])

    def done(t, y):
        return max(path.smax - y[0] - S_TOL, np.hypot(end[0] - y[1], end[1] - y[2]) - position_tol)
    done.terminal = True
    done.direction = -1

    y0 = np.array([path.smin, initial.position[0], initial.position[1], initial.orientation])
    result = integrate(dynamics, y0, settings, events=done)

    law = controller(mode)
    inputs, goals, distances, rates, clearances = [], [], [], [], []
    for y in result.y:
        gstate = GovernedState.from_array(y)
        rate, distance = _rates(gstate, world, path, gains, ggains, method, mode, settings, reachable)
        goal = path_point(path, gstate.s)
        control = law(gstate.robot, goal, gains)
        inputs.append([control.v, control.w])
        goals.append(goal)
        distances.append(distance)
        rates.append(rate.ds)
        clearances.append(robot_clearance(world, gstate.robot.position))

    stall = longest_stall(result.t, rates)
    stalled = stall > stall_window
    if stalled:
        logger.warning("Path parameter frozen for %.2f s (window %.2f s) with method %s.", stall, stall_window, method)
    if result.truncated:
        logger.warning("Path following with method %s truncated at %.1f s (s=%.4f of %.4f).",
                       method, settings.max_time, result.y[-1, 0], path.smax)
    if reachable is not None:
        logger.debug("Reachable cache: %s", reachable.cache_info())

    follow = FollowResult(result.t, result.y, inputs, goals, distances, clearances, path, method, mode,
                          reached=not result.truncated, truncated=result.truncated, stalled=stalled,
                          reachable=reachable)
    logger.info("Method %s: travel time %.3f s, min clearance %.4f m, terminal error %.2e m.",
                method, follow.travel_time, follow.min_clearance, follow.terminal_error)
    return follow

"""
This script contains code for adaptive Runge-Kutta integration of the
closed-loop unicycle and the recording of its trajectories.
"""

import logging
import collections
import numpy as np
from scipy.integrate import solve_ivp, trapezoid

from pirouette.utils import as_vec2, check_positive, DomainError, PreconditionError, StiffnessError
from pirouette.geometry.primitives import cross
from pirouette.unicycle import (UnicycleState, BIDIRECTIONAL, check_mode, controller,
                                mode_heading_error, heading_error, lyapunov_value)

logger = logging.getLogger(__name__)

np.seterr(over="raise")

# fixed column order of the data files
COLUMNS = ("time", "x", "y", "theta", "v", "w", "psi", "dist_goal", "safedist", "s")

IntegrationResult = collections.namedtuple("IntegrationResult", ["t", "y", "truncated", "message"])

# ---------------------------------------------------------------------------------------------------------------------
# Integrator
# ---------------------------------------------------------------------------------------------------------------------


class IntegratorSettings(object):
    """Tolerances and limits of the adaptive integrator."""

    def __init__(self, rel_tol=1e-6, abs_tol=1e-9, max_step=np.inf, max_time=100.0, goal_eps=None):
        """
        Description
        ----------
        Settings of the embedded Runge-Kutta 4(5) integrator.

        Parameters
        ----------
        rel_tol: Float
            Relative local error tolerance.
        abs_tol: Float
            Absolute local error tolerance.
        max_step: Float
            Largest accepted step in seconds, unbounded by default.
        max_time: Float
            Integration horizon in seconds.
        goal_eps: Float
            Goal distance in meters below which a run counts as converged.
            None selects 1e-4 * max(1, initial goal distance).

        Returns
        ----------
        IntegratorSettings object
        """
        self.rel_tol = check_positive(rel_tol, "Relative tolerance")
        self.abs_tol = check_positive(abs_tol, "Absolute tolerance")
        self.max_step = np.inf if max_step == np.inf else check_positive(max_step, "Max step")
        self.max_time = check_positive(max_time, "Max time")
        self.goal_eps = None if goal_eps is None else check_positive(goal_eps, "Goal tolerance")

    def replace(self, **kwargs):
        """Copy of the settings with some fields replaced."""
        fields = self.to_record()
        for key, value in kwargs.items():
            if key not in fields:
                raise DomainError("Invalid integrator setting argument {!r}.".format(key))
            fields[key] = value
        return IntegratorSettings(**fields)

    def goal_tolerance(self, distance):
        if self.goal_eps is not None:
            return self.goal_eps
        return 1e-4 * max(1.0, distance)

    def to_record(self):
        return {"rel_tol": self.rel_tol, "abs_tol": self.abs_tol, "max_step": self.max_step,
                "max_time": self.max_time, "goal_eps": self.goal_eps}

    def __repr__(self):
        return "IntegratorSettings({})".format(", ".join("{}={}".format(k, v) for k, v in self.to_record().items()))


def integrate(dynamics, initial, settings=None, events=None):
    """
    Description
    ----------
    Integrate an autonomous or time-varying ODE with the Dormand-Prince
    Runge-Kutta 4(5) pair and proportional step control, sampling every
    accepted step.

    Parameters
    ----------
    dynamics: callable
        Right hand side f(t, y) returning an array like y.
    initial: array_like
        Initial state vector at t = 0.
    settings: IntegratorSettings
        Tolerances and limits. Defaults to IntegratorSettings().
    events: callable or list
        Optional terminal events in the solve_ivp convention.

    Returns
    ----------
    IntegrationResult(t, y, truncated, message) with y of shape (n, dim).
    truncated is True when max_time was reached before a terminal event.
    """
    settings = settings or IntegratorSettings()
    initial = np.atleast_1d(np.asarray(initial, dtype=float))
    solution = solve_ivp(dynamics, (0.0, settings.max_time), initial, method="RK45",
                         rtol=settings.rel_tol, atol=settings.abs_tol, max_step=settings.max_step,
                         events=events)
    if solution.status == -1:
        raise StiffnessError("Integration step failed: {}".format(solution.message))
    truncated = solution.status == 0
    logger.debug("Integrated %d steps to t=%.4f (%s)", solution.t.shape[0] - 1, solution.t[-1], solution.message)
    return IntegrationResult(solution.t, solution.y.T, truncated, solution.message)

# ---------------------------------------------------------------------------------------------------------------------
# Trajectories
# ---------------------------------------------------------------------------------------------------------------------


class Trajectory(object):
    """Closed-loop samples at the accepted integrator steps."""

    def __init__(self, t, positions, orientations, inputs, goal, mode, turning_abs=None, truncated=False):
        """
        Description
        ----------
        Sampled closed-loop trajectory towards a fixed goal with the
        heading error, goal distance and Lyapunov value of every sample.

        Parameters
        ----------
        t: array_like
            Strictly increasing sample times starting at zero.
        positions: array_like
            An (n, 2) array of positions.
        orientations: array_like
            Unwrapped orientations.
        inputs: array_like
            An (n, 2) array of (v, w) control inputs.
        goal: array_like
            The goal position.
        mode: String
            Steering mode.
        turning_abs: array_like
            Running integral of |w|, when integrated with the state.
        truncated: Boolean
            True when the run stopped at max_time.

        Returns
        ----------
        Trajectory object
        """
        self.t = np.asarray(t, dtype=float)
        if self.t.shape[0] == 0 or self.t[0] != 0.0 or np.any(np.diff(self.t) <= 0.0):
            raise DomainError("Sample times must start at zero and increase strictly.")
        self.positions = np.asarray(positions, dtype=float).reshape(-1, 2)
        self.orientations = np.asarray(orientations, dtype=float)
        self.inputs = np.asarray(inputs, dtype=float).reshape(-1, 2)
        self.goal = as_vec2(goal)
        self.mode = check_mode(mode)
        self.turning_abs = None if turning_abs is None else np.asarray(turning_abs, dtype=float)
        self.truncated = truncated

        states = self.states
        self.psi = np.array([mode_heading_error(s, self.goal, mode) for s in states])
        self.dist = np.linalg.norm(self.goal - self.positions, axis=1)
        self.lyapunov = np.array([lyapunov_value(s, self.goal) for s in states])

    def __len__(self):
        return self.t.shape[0]

    @property
    def states(self):
        return [UnicycleState(p, th) for p, th in zip(self.positions, self.orientations)]

    def state(self, i):
        return UnicycleState(self.positions[i], self.orientations[i])

    @property
    def final_state(self):
        return self.state(-1)

    @property
    def converged(self):
        return not self.truncated

    def as_columns(self, safedist=None, s=None):
        """
        Samples as an (n, 10) array in COLUMNS order. Columns without data
        for this run (safedist, s) are NaN.
        """
        n = len(self)
        safedist = np.full(n, np.nan) if safedist is None else np.asarray(safedist, dtype=float)
        s = np.full(n, np.nan) if s is None else np.asarray(s, dtype=float)
        return np.column_stack([self.t, self.positions, self.orientations, self.inputs,
                                self.psi, self.dist, safedist, s])

    def __repr__(self):
        return "Trajectory(samples={}, t_end={:.4f}, truncated={})".format(len(self), self.t[-1], self.truncated)


def closed_loop(goal, gains, mode=BIDIRECTIONAL):
    """
    Right hand side of the closed-loop unicycle on the augmented state
    (x, y, theta, int |w| dt), theta left unwrapped.
    """
    goal = as_vec2(goal)
    law = controller(mode)

    def dynamics(t, y):
        control = law(UnicycleState(y[:2], y[2]), goal, gains)
        return np.array([control.v * np.cos(y[2]), control.v * np.sin(y[2]), control.w, abs(control.w)])

    return dynamics


def simulate_to_goal(initial, goal, gains, mode=BIDIRECTIONAL, settings=None):
    """
    Description
    ----------
    Integrate the closed-loop unicycle towards a fixed goal until the goal
    distance drops below the goal tolerance or max_time is reached.

    Parameters
    ----------
    initial: UnicycleState
        Initial state.
    goal: array_like
        Goal position.
    gains: ControlGains
        Control gains.
    mode: String
        Steering mode, one of "bi", "fwd", "bwd".
    settings: IntegratorSettings
        Integrator settings.

    Returns
    ----------
    Trajectory
    """
    goal = as_vec2(goal)
    check_mode(mode)
    settings = settings or IntegratorSettings()
    dist0 = float(np.linalg.norm(goal - initial.position))
    eps = settings.goal_tolerance(dist0)
    law = controller(mode)

    if dist0 < eps:
        control = law(initial, goal, gains)
        return Trajectory([0.0], initial.position.reshape(1, 2), [initial.orientation],
                          [[control.v, control.w]], goal, mode, turning_abs=[0.0])

    def reached(t, y):
        return np.hypot(goal[0] - y[0], goal[1] - y[1]) - eps
    reached.terminal = True
    reached.direction = -1

    y0 = np.array([initial.position[0], initial.position[1], initial.orientation, 0.0])
    result = integrate(closed_loop(goal, gains, mode), y0, settings, events=reached)
    inputs = np.array([law(UnicycleState(y[:2], y[2]), goal, gains) for y in result.y])
    if result.truncated:
        logger.warning("Closed loop did not reach the goal within %.1f s (distance %.3e).",
                       settings.max_time, np.hypot(*(goal - result.y[-1, :2])))
    else:
        logger.debug("Closed loop reached the goal at t=%.4f after %d samples.", result.t[-1], result.t.shape[0])
    return Trajectory(result.t, result.y[:, :2], result.y[:, 2], inputs, goal, mode,
                      turning_abs=result.y[:, 3], truncated=result.truncated)

# ---------------------------------------------------------------------------------------------------------------------
# Trajectory Measurements
# ---------------------------------------------------------------------------------------------------------------------


def integrated_turning(trajectory, method="channel"):
    """
    Description
    ----------
    Signed and absolute integral of the angular velocity along a converged
    trajectory.

    Parameters
    ----------
    trajectory: Trajectory
        A converged closed-loop trajectory.
    method: String
        "channel" reads the unwrapped orientation and the integrated |w|
        channel. "trapezoid" applies the trapezoidal rule to the sampled
        inputs.

    Returns
    ----------
    Tuple (signed, absolute) in radians.
    """
    if trajectory.truncated:
        raise PreconditionError("Turning integrals require a converged trajectory.")
    if method == "channel" and trajectory.turning_abs is not None:
        signed = trajectory.orientations[-1] - trajectory.orientations[0]
        return float(signed), float(trajectory.turning_abs[-1] - trajectory.turning_abs[0])
    if method in ("channel", "trapezoid"):
        w = trajectory.inputs[:, 1]
        return float(trapezoid(w, trajectory.t)), float(trapezoid(np.abs(w), trajectory.t))
    raise DomainError("Invalid turning integral method argument.")


def crosses_goal_line(trajectory, tol=1e-9):
    """
    True when the trajectory visits both sides of the line through its
    initial position and the goal, the signature of spiral circulation.
    """
    start = trajectory.positions[0]
    axis = trajectory.goal - start
    scale = float(np.dot(axis, axis))
    if scale == 0.0:
        return False
    offsets = np.array([cross(axis, p - start) for p in trajectory.positions]) / scale
    return bool(np.any(offsets > tol) and np.any(offsets < -tol))


def heading_error_residual(trajectory, gains):
    """
    Largest deviation of the sampled bidirectional heading error from the
    linear decay psi0 * exp(-kw t).
    """
    psi = np.array([heading_error(s, trajectory.goal) for s in trajectory.states])
    return float(np.max(np.abs(psi - psi[0] * np.exp(-gains.kw * trajectory.t))))

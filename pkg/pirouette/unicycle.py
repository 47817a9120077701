"""
This script contains the kinematic unicycle model, its angular heading
errors and the bidirectional, forward and backward goal controllers based on
angular feedback linearization.
"""

import collections
import numpy as np

from pirouette.utils import as_vec2, check_positive, DomainError
from pirouette.geometry.primitives import wrap_angle, heading_vector, normal_vector

np.seterr(over="raise")

HALF_PI = 0.5 * np.pi

BIDIRECTIONAL = "bi"
FORWARD = "fwd"
BACKWARD = "bwd"
MODES = (BIDIRECTIONAL, FORWARD, BACKWARD)

ControlInput = collections.namedtuple("ControlInput", ["v", "w"])

# ---------------------------------------------------------------------------------------------------------------------
# State and Gains
# ---------------------------------------------------------------------------------------------------------------------


class UnicycleState(object):
    """Planar unicycle pose."""

    def __init__(self, position, orientation):
        """
        Description
        ----------
        Unicycle state (x, theta). The orientation is stored in its canonical
        form in [-pi, pi).

        Parameters
        ----------
        position: array_like
            Position in meters.
        orientation: Float
            Orientation in radians, counterclockwise from the horizontal axis.

        Returns
        ----------
        UnicycleState object
        """
        self.position = as_vec2(position)
        if not np.isfinite(orientation):
            raise DomainError("Orientation must be finite.")
        self.orientation = wrap_angle(orientation)

    @classmethod
    def from_array(cls, arr):
        """Build a state from an (x, y, theta) array."""
        arr = np.asarray(arr, dtype=float)
        return cls(arr[:2], arr[2])

    def as_array(self):
        return np.array([self.position[0], self.position[1], self.orientation])

    def __repr__(self):
        return "UnicycleState(position={}, orientation={})".format(self.position.tolist(), self.orientation)


class ControlGains(object):
    """Linear and angular control gains."""

    def __init__(self, kv=1.0, kw=2.0):
        """
        Description
        ----------
        Positive gains of the unicycle controllers.

        Parameters
        ----------
        kv: Float
            Linear velocity gain in 1/s.
        kw: Float
            Angular velocity gain in 1/s.

        Returns
        ----------
        ControlGains object
        """
        self.kv = check_positive(kv, "Linear gain")
        self.kw = check_positive(kw, "Angular gain")

    @property
    def ratio(self):
        """kv / (2 kw), the weight of the sine integral in the turning effort."""
        return self.kv / (2.0 * self.kw)

    @property
    def spiral_free(self):
        """True when kv <= kw, which rules out circulation around the goal."""
        return self.kv <= self.kw

    def to_record(self):
        return {"kv": self.kv, "kw": self.kw}

    def __repr__(self):
        return "ControlGains(kv={}, kw={})".format(self.kv, self.kw)


def check_mode(mode):
    if mode not in MODES:
        raise DomainError("Invalid steering mode argument {!r}; expected one of {}.".format(mode, MODES))
    return mode

# ---------------------------------------------------------------------------------------------------------------------
# Heading Errors
# ---------------------------------------------------------------------------------------------------------------------


def _goal_frame(state, goal):
    """Goal offset projected on the heading and normal directions."""
    offset = as_vec2(goal) - state.position
    theta = state.orientation
    return float(np.dot(heading_vector(theta), offset)), float(np.dot(normal_vector(theta), offset))


def heading_error(state, goal):
    """
    Description
    ----------
    Bidirectional angular heading error, the counterclockwise angle from the
    heading line to the line through the position and the goal.

    Parameters
    ----------
    state: UnicycleState
        Current unicycle state.
    goal: array_like
        Goal position.

    Returns
    ----------
    Angle in [-pi/2, pi/2]. Zero at the goal, +-pi/2 when the goal is
    exactly abeam.
    """
    along, normal = _goal_frame(state, goal)
    if along == 0.0:
        if normal == 0.0:
            return 0.0
        return float(np.sign(normal) * HALF_PI)
    return float(np.arctan(normal / along))


def heading_error_forward(state, goal):
    """Heading error of a forward-moving unicycle, in [-pi, pi)."""
    along, normal = _goal_frame(state, goal)
    if along == 0.0 and normal == 0.0:
        return 0.0
    return wrap_angle(np.arctan2(normal, along))


def heading_error_backward(state, goal):
    """Heading error of a backward-moving unicycle, in [-pi, pi)."""
    along, normal = _goal_frame(state, goal)
    if along == 0.0 and normal == 0.0:
        return 0.0
    return wrap_angle(np.arctan2(-normal, -along))


def mode_heading_error(state, goal, mode):
    """Heading error matching the steering mode."""
    check_mode(mode)
    if mode == FORWARD:
        return heading_error_forward(state, goal)
    if mode == BACKWARD:
        return heading_error_backward(state, goal)
    return heading_error(state, goal)


def heading_error_rate(state, goal, control):
    """
    Open-loop rate of change of the bidirectional heading error under an
    arbitrary input, -w + v n.(g - x) / |g - x|^2. Zero at the goal.
    """
    offset = as_vec2(goal) - state.position
    dist2 = float(np.dot(offset, offset))
    if dist2 == 0.0:
        return 0.0
    return -control.w + control.v * float(np.dot(normal_vector(state.orientation), offset)) / dist2

# ---------------------------------------------------------------------------------------------------------------------
# Controllers
# ---------------------------------------------------------------------------------------------------------------------


def control_bidirectional(state, goal, gains):
    """
    Description
    ----------
    Bidirectional unicycle control that moves forward or backward, whichever
    decreases the distance to the goal, with linear heading error dynamics.

    Parameters
    ----------
    state: UnicycleState
        Current unicycle state.
    goal: array_like
        Goal position.
    gains: ControlGains
        Positive control gains.

    Returns
    ----------
    ControlInput(v, w)
    """
    along, _ = _goal_frame(state, goal)
    psi = heading_error(state, goal)
    v = gains.kv * along
    w = gains.kw * psi + 0.5 * gains.kv * np.sin(2.0 * psi)
    return ControlInput(float(v), float(w))


def _directional(psi, along, gains, clamp):
    if abs(psi) <= HALF_PI:
        v = clamp(0.0, gains.kv * along)
        w = gains.kw * psi + 0.5 * gains.kv * np.sin(2.0 * psi)
        return ControlInput(float(v), float(w))
    # turn in place until the goal is within the moving half plane
    return ControlInput(0.0, float(gains.kw * psi))


def control_forward(state, goal, gains):
    """
    Forward-only unicycle control. Identical to the bidirectional control
    while the goal lies ahead; turns in place otherwise.
    """
    along, _ = _goal_frame(state, goal)
    return _directional(heading_error_forward(state, goal), along, gains, max)


def control_backward(state, goal, gains):
    """
    Backward-only unicycle control, the mirror image of control_forward.
    """
    along, _ = _goal_frame(state, goal)
    return _directional(heading_error_backward(state, goal), along, gains, min)


CONTROLLERS = {
    BIDIRECTIONAL: control_bidirectional,
    FORWARD: control_forward,
    BACKWARD: control_backward,
}


def controller(mode):
    """Return the control law for a steering mode."""
    return CONTROLLERS[check_mode(mode)]

# ---------------------------------------------------------------------------------------------------------------------
# Kinematics
# ---------------------------------------------------------------------------------------------------------------------


def state_derivative(state, control):
    """
    Description
    ----------
    Nonholonomic unicycle kinematics dx = v o_theta, dtheta = w.

    Parameters
    ----------
    state: UnicycleState
        Current unicycle state.
    control: ControlInput
        Linear and angular velocity.

    Returns
    ----------
    Tuple of the position rate (length 2 array) and the orientation rate.
    """
    return control.v * heading_vector(state.orientation), float(control.w)


def lyapunov_value(state, goal):
    """V = psi^2 + |g - x|^2, nonincreasing along bidirectional closed loops."""
    offset = as_vec2(goal) - state.position
    return heading_error(state, goal) ** 2 + float(np.dot(offset, offset))

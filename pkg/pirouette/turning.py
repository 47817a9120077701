"""
This script contains code for the sine integral, the total turning effort
and final orientation of the unicycle controllers, and the least squares
approximation of the sine integral by a sum of sinusoids.
"""

import logging
import collections
import numpy as np
from scipy.optimize import least_squares

from pirouette.utils import DomainError, FitError
from pirouette.geometry.primitives import wrap_angle
from pirouette.unicycle import (UnicycleState, BIDIRECTIONAL, HALF_PI, check_mode, mode_heading_error)
from pirouette.validation import rmse

logger = logging.getLogger(__name__)

np.seterr(over="raise")

SI_DOMAIN = 4.0 * np.pi
SI_PI = 1.8519370519824663

# weights, frequencies and rmse of the published sinusoid approximations
TABLE_I = {
    1: ((1.839,), (0.535,), 8.0e-3),
    2: ((1.931, 0.424), (0.330, 0.854), 1.3e-3),
    3: ((1.964, 0.553, 0.189), (0.235, 0.656, 0.931), 6.1e-4),
}

TurningReport = collections.namedtuple(
    "TurningReport", ["theta_total", "final_orientation", "final_heading_error"])

# ---------------------------------------------------------------------------------------------------------------------
# Sine Integral
# ---------------------------------------------------------------------------------------------------------------------


def sine_integral(x):
    """
    Description
    ----------
    Sine integral Si(x) = int_0^x sin(t)/t dt evaluated by its Maclaurin
    series with a term recurrence.

    Parameters
    ----------
    x: float or array_like
        Argument with |x| <= 4 pi.

    Returns
    ----------
    Si(x) with the shape of the input.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(np.abs(arr) > SI_DOMAIN * (1.0 + 1e-12)):
        raise DomainError("Sine integral argument must satisfy |x| <= 4 pi.")
    x2 = arr * arr
    largest = float(np.max(x2)) if arr.size else 0.0
    term = arr.copy()
    total = arr.copy()
    k = 0
    while True:
        k += 1
        # term = (-1)^k x^(2k+1) / (2k+1)!
        term = -term * x2 / ((2.0 * k) * (2.0 * k + 1.0))
        contrib = term / (2.0 * k + 1.0)
        total = total + contrib
        if (2.0 * k) * (2.0 * k + 1.0) > largest and (not arr.size or np.max(np.abs(contrib)) < 1e-16):
            break
    if total.ndim == 0:
        return float(total)
    return total

# ---------------------------------------------------------------------------------------------------------------------
# Total Turning Effort
# ---------------------------------------------------------------------------------------------------------------------


def _si_argument(psi0, mode):
    if mode == BIDIRECTIONAL:
        return 2.0 * psi0
    # directional controllers turn in place beyond +-pi/2 and then follow the
    # closed loop that starts at +-pi/2
    if psi0 < -HALF_PI:
        return -np.pi
    if psi0 > HALF_PI:
        return np.pi
    return 2.0 * psi0


def total_turning(state, goal, gains, mode=BIDIRECTIONAL):
    """
    Description
    ----------
    Signed total turning effort, the integral of the angular velocity input
    over the whole closed-loop motion towards the goal.

    Parameters
    ----------
    state: UnicycleState
        Initial unicycle state.
    goal: array_like
        Goal position.
    gains: ControlGains
        Control gains.
    mode: String
        Steering mode, one of "bi", "fwd", "bwd".

    Returns
    ----------
    Total turning in radians.
    """
    psi0 = mode_heading_error(state, goal, check_mode(mode))
    return psi0 + gains.ratio * sine_integral(_si_argument(psi0, mode))


def final_orientation(state, goal, gains, mode=BIDIRECTIONAL):
    """Asymptotic unicycle orientation, wrapped to [-pi, pi)."""
    return wrap_angle(state.orientation + total_turning(state, goal, gains, mode))


def final_heading_error(state, goal, gains, mode=BIDIRECTIONAL):
    """
    Closed form heading error of the final orientation seen from the
    initial position, -(kv / 2kw) Si(2 psi0). Exact for kv <= kw.
    """
    psi0 = mode_heading_error(state, goal, check_mode(mode))
    return -gains.ratio * sine_integral(_si_argument(psi0, mode))


def turning_report(state, goal, gains, mode=BIDIRECTIONAL):
    """Bundle the total turning, final orientation and final heading error."""
    theta_total = total_turning(state, goal, gains, mode)
    theta_final = wrap_angle(state.orientation + theta_total)
    psi_final = mode_heading_error(UnicycleState(state.position, theta_final), goal, mode)
    return TurningReport(theta_total, theta_final, psi_final)


def turning_bounds(psi0, gains):
    """
    Description
    ----------
    Linear bounds on the magnitude of the bidirectional total turning effort.

    Parameters
    ----------
    psi0: Float
        Initial heading error, |psi0| <= pi/2.
    gains: ControlGains
        Control gains.

    Returns
    ----------
    Tuple (|psi0|, (1 + kv/kw) |psi0|).
    """
    if abs(psi0) > HALF_PI * (1.0 + 1e-12):
        raise DomainError("Heading error must satisfy |psi0| <= pi/2.")
    magnitude = abs(psi0)
    return magnitude, (1.0 + gains.kv / gains.kw) * magnitude


def heading_error_bound(psi0, gains):
    """Sine-integral-free bound (kv / kw) |psi0| on the final heading error."""
    return gains.kv / gains.kw * abs(psi0)

# ---------------------------------------------------------------------------------------------------------------------
# Sinusoid Approximation
# ---------------------------------------------------------------------------------------------------------------------


def si_sinusoid(x, weights, frequencies):
    """Evaluate sum_k a_k sin(w_k x)."""
    x = np.asarray(x, dtype=float)
    weights = np.asarray(weights, dtype=float)
    frequencies = np.asarray(frequencies, dtype=float)
    return np.sum(weights[:, None] * np.sin(np.outer(frequencies, x.ravel())), axis=0).reshape(x.shape)


class SiFit(object):
    """Weights and frequencies of a sinusoid approximation of Si on [-pi, pi]."""

    def __init__(self, weights, frequencies, rmse_value, converged=True, nfev=0):
        weights = np.asarray(weights, dtype=float)
        frequencies = np.asarray(frequencies, dtype=float)
        if weights.shape != frequencies.shape or weights.ndim != 1:
            raise DomainError("Fit requires one frequency per weight.")
        # a sin(w x) == (-a) sin(-w x): keep weights positive, frequencies ascending
        flip = weights < 0.0
        weights = np.where(flip, -weights, weights)
        frequencies = np.where(flip, -frequencies, frequencies)
        order = np.argsort(frequencies)
        self.weights = weights[order]
        self.frequencies = frequencies[order]
        self.rmse = float(rmse_value)
        self.converged = converged
        self.nfev = nfev

    @property
    def order(self):
        return self.weights.shape[0]

    def __call__(self, x):
        return si_sinusoid(x, self.weights, self.frequencies)

    def to_record(self):
        return {"order": self.order, "weights": self.weights.tolist(),
                "frequencies": self.frequencies.tolist(), "rmse": self.rmse,
                "converged": self.converged, "nfev": self.nfev}

    def __repr__(self):
        return "SiFit(weights={}, frequencies={}, rmse={:.3e})".format(
            np.round(self.weights, 4).tolist(), np.round(self.frequencies, 4).tolist(), self.rmse)


def fit_si_sinusoids(order=3, grid_size=2001, init=None, starts=1, seed=None, max_nfev=5000):
    """
    Description
    ----------
    Fit sum_k a_k sin(w_k x) to Si(x) on a uniform grid over [-pi, pi] by
    Levenberg-Marquardt with an analytic Jacobian.

    Parameters
    ----------
    order: int
        Number of sinusoids, 1, 2 or 3.
    grid_size: int
        Number of uniform grid points.
    init: tuple
        Optional (weights, frequencies) starting point. Defaults to the
        published values for the order.
    starts: int
        Number of starting points. Starts beyond the first are drawn at
        random from seed.
    seed: int
        Seed for the random starting points.
    max_nfev: int
        Function evaluation cap per start.

    Returns
    ----------
    The SiFit with the smallest rmse.
    """
    if order not in TABLE_I:
        raise DomainError("Fit order must be 1, 2 or 3.")
    if not isinstance(grid_size, int) or grid_size < 2 * order + 1:
        raise DomainError("Grid size must be an integer of at least 2 * order + 1.")
    if not isinstance(starts, int) or starts < 1:
        raise DomainError("Number of starts must be a positive integer.")

    grid = np.linspace(-np.pi, np.pi, grid_size)
    target = sine_integral(grid)

    def residual(params):
        return si_sinusoid(grid, params[:order], params[order:]) - target

    def jacobian(params):
        weights, frequencies = params[:order], params[order:]
        phase = np.outer(grid, frequencies)
        return np.hstack([np.sin(phase), weights[None, :] * grid[:, None] * np.cos(phase)])

    if init is None:
        weights0, frequencies0, _ = TABLE_I[order]
    else:
        weights0, frequencies0 = init
    initial = [np.concatenate([np.asarray(weights0, dtype=float), np.asarray(frequencies0, dtype=float)])]
    if initial[0].shape[0] != 2 * order:
        raise DomainError("Initial guess must hold {} weights and {} frequencies.".format(order, order))
    random = np.random.RandomState(seed)
    for _ in range(starts - 1):
        initial.append(np.concatenate([random.uniform(0.1, 2.0, order), np.sort(random.uniform(0.1, 1.0, order))]))

    best = None
    for i, params0 in enumerate(initial):
        result = least_squares(residual, params0, jac=jacobian, method="lm",
                               xtol=1e-14, ftol=1e-14, gtol=1e-14, max_nfev=max_nfev)
        fit = SiFit(result.x[:order], result.x[order:],
                    rmse(si_sinusoid(grid, result.x[:order], result.x[order:]), target),
                    converged=result.status > 0, nfev=int(result.nfev))
        logger.debug("Si fit order %d start %d: status %d, rmse %.3e", order, i, result.status, fit.rmse)
        if best is None or (fit.converged, -fit.rmse) > (best.converged, -best.rmse):
            best = fit

    if not best.converged:
        raise FitError("Sine integral fit of order {} did not converge in {} evaluations.".format(
            order, max_nfev), best=best)
    logger.info("Si fit order %d: rmse %.3e", order, best.rmse)
    return best

"""
This script contains code for useful array coercions, angle helpers and the
exception types used in the other modules of pirouette.
"""

import numpy as np

numeric_types = (int, float, np.integer, np.floating)

np.seterr(over="raise")

# ---------------------------------------------------------------------------------------------------------------------
# Exceptions
# ---------------------------------------------------------------------------------------------------------------------


class PirouetteError(Exception):
    """Base class for every error raised by pirouette."""


class DomainError(PirouetteError, ValueError):
    """An argument lies outside the domain of a function."""


class PreconditionError(PirouetteError):
    """A named hypothesis of an operation does not hold."""


class ValidationError(PirouetteError, ValueError):
    """A scenario or path failed validation."""

    def __init__(self, message, line=None):
        """
        Description
        ----------
        Validation error with optional source line context.

        Parameters
        ----------
        message: String
            What failed.
        line: int
            The line of the offending input, when known.
        """
        self.line = line
        if line is not None:
            message = "line {}: {}".format(line, message)
        PirouetteError.__init__(self, message)


class StiffnessError(PirouetteError):
    """The integrator step size collapsed."""


class TruncationError(PirouetteError):
    """An integration hit its time limit before converging."""


class FitError(PirouetteError):
    """Nonlinear least squares did not converge."""

    def __init__(self, message, best=None):
        self.best = best
        PirouetteError.__init__(self, message)

# ---------------------------------------------------------------------------------------------------------------------
# Array Checks
# ---------------------------------------------------------------------------------------------------------------------


def as_vec2(arr):
    """
    Function to ensure that an input is a finite planar vector. Used to
    formalize point / direction inputs for the geometry functions.
    """
    arr = np.asarray(arr, dtype=float)
    if arr.shape == (2,):
        vec = arr
    elif arr.shape in ((1, 2), (2, 1)):
        vec = arr.reshape(2)
    else:
        raise DomainError("Not appropriate input shape.")
    if not np.all(np.isfinite(vec)):
        raise DomainError("Vector components must be finite.")
    return vec.copy()


def as_points(arr):
    """
    Function to ensure that an input is an (n, 2) array of finite points.
    """
    arr = np.asarray(arr, dtype=float)
    if arr.ndim == 1 and arr.shape[0] == 2:
        arr = arr.reshape(1, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DomainError("Not appropriate input shape.")
    if not np.all(np.isfinite(arr)):
        raise DomainError("Point coordinates must be finite.")
    return arr.copy()


def check_positive(value, name):
    """
    Function to validate a strictly positive scalar parameter.
    """
    if not isinstance(value, numeric_types) or isinstance(value, bool):
        raise DomainError("{} parameter must be a number.".format(name))
    if not np.isfinite(value) or value <= 0.0:
        raise DomainError("{} parameter must be greater than zero.".format(name))
    return float(value)


def check_nonnegative(value, name):
    """
    Function to validate a nonnegative scalar parameter.
    """
    if not isinstance(value, numeric_types) or isinstance(value, bool):
        raise DomainError("{} parameter must be a number.".format(name))
    if not np.isfinite(value) or value < 0.0:
        raise DomainError("{} parameter must be greater than or equal to zero.".format(name))
    return float(value)


def exactly_1d(arr):
    """
    Function to ensure that an input has exactly one dimension. Used to
    formalize sample sequences for the audit metrics.
    """
    if isinstance(arr, numeric_types) and not isinstance(arr, bool):
        return np.array([float(arr)])
    arr = np.asarray(arr, dtype=float)
    if arr.ndim == 1:
        return arr
    if arr.ndim == 2:
        if arr.shape[0] == 1:
            return arr[0, :]
        if arr.shape[1] == 1:
            return arr[:, 0]
    raise DomainError("Not appropriate input shape.")

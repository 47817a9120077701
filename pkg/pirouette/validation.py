"""
Functions for numerical audits: fit error, monotonicity of sampled
quantities and containment of sampled trajectories in motion sets.
"""

import numpy as np

from pirouette.geometry.distance import distances_points_to_set
from pirouette.utils import exactly_1d, as_points, check_nonnegative, DomainError

np.seterr(over="raise")


def preprocess(func):
    """
    Decorator function used for preprocessing the prediction / target pairs
    of the error metrics.
    """
    def wrapper(*args, **kwargs):
        """
        Wrapper function for decorator.
        """
        if args:
            predictions, targets = args[0], args[1]
        else:
            predictions, targets = kwargs['predictions'], kwargs['targets']
        predictions, targets = exactly_1d(predictions), exactly_1d(targets)

        if predictions.shape[0] != targets.shape[0]:
            raise DomainError("Number of predictions does not match number of targets.")

        return func(predictions=predictions, targets=targets)

    return wrapper


@preprocess
def rmse(predictions, targets):
    """
    Description
    ----------
    Root mean squared error between two sample sequences.

    Parameters
    ----------
    predictions: array-like
        Approximated values.
    targets: array-like
        Reference values.

    Returns
    ----------
    Float
    """
    return float(np.sqrt(np.sum((predictions - targets) ** 2) / targets.shape[0]))


@preprocess
def max_abs_error(predictions, targets):
    """Largest absolute deviation between two sample sequences."""
    if targets.shape[0] == 0:
        return 0.0
    return float(np.max(np.abs(predictions - targets)))


def non_increasing_violations(values, tol=0.0):
    """
    Description
    ----------
    Indices i at which a sampled sequence increases, values[i + 1] >
    values[i] + tol.

    Parameters
    ----------
    values: array-like
        Samples in time order.
    tol: Float
        Allowed increase per step.

    Returns
    ----------
    Integer array of indices, empty when the sequence is non-increasing.
    """
    values = exactly_1d(values)
    tol = check_nonnegative(tol, "Tolerance")
    return np.flatnonzero(np.diff(values) > tol)


def containment_violations(shape, points, tol=0.0):
    """
    Description
    ----------
    Indices of sampled points lying farther than tol from a set.

    Parameters
    ----------
    shape: Disk, Polygon, ConeHull or PointChain
        The containing set.
    points: array-like
        An (n, 2) array of positions.
    tol: Float
        Dilation of the set in meters.

    Returns
    ----------
    Integer array of indices, empty when every point is contained.
    """
    tol = check_nonnegative(tol, "Tolerance")
    points = as_points(points)
    return np.flatnonzero(distances_points_to_set(points, shape) > tol)

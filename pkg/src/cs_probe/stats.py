"""Correlation statistics for the evaluation reports."""

from __future__ import annotations

import math

import numpy as np

from cs_probe.errors import InvalidInputError, UndefinedCorrelationError


def pearson_r(xs, ys) -> float:
    """Sample Pearson correlation coefficient, clamped to [-1, 1].

    Requires two equal-length, non-constant series of length >= 2.
    """
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.ndim != 1 or y.ndim != 1:
        raise InvalidInputError("series must be one-dimensional")
    if x.shape[0] != y.shape[0]:
        raise InvalidInputError(f"length mismatch: {x.shape[0]} vs {y.shape[0]}")
    if x.shape[0] < 2:
        raise InvalidInputError("need at least two observations")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise InvalidInputError("series contain non-finite values")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedCorrelationError("correlation undefined for a constant series")
    r = float(np.dot(dx, dy)) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))

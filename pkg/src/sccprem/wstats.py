"""Weighted summary statistics used throughout the package.

All routines take nonnegative weights and are invariant to a uniform
rescaling of the weights.  Quantiles interpolate linearly between order
statistics; with equal weights they reduce exactly to numpy's default
(linear) quantile method.
"""
from __future__ import annotations

import numpy as np

from .errors import DomainError


def _check(values, weights):
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if values.shape != weights.shape or values.ndim != 1:
        raise DomainError("values and weights must be 1-d arrays of equal length")
    if len(values) == 0:
        raise DomainError("empty sample")
    if np.any(weights < 0) or not np.all(np.isfinite(weights)):
        raise DomainError("weights must be finite and nonnegative")
    total = weights.sum()
    if total <= 0:
        raise DomainError("total weight must be positive")
    return values, weights, total


def weighted_mean(values, weights) -> float:
    values, weights, total = _check(values, weights)
    return float(np.dot(values, weights) / total)


def weighted_var(values, weights) -> float:
    """Population-style weighted variance sum(w*(x-m)^2)/sum(w)."""
    values, weights, total = _check(values, weights)
    m = np.dot(values, weights) / total
    return float(np.dot(weights, (values - m) ** 2) / total)


def weighted_sd(values, weights) -> float:
    return float(np.sqrt(weighted_var(values, weights)))


def weighted_skewness(values, weights) -> float:
    """Third standardized weighted moment."""
    values, weights, total = _check(values, weights)
    m = np.dot(values, weights) / total
    d = values - m
    var = np.dot(weights, d**2) / total
    if var == 0.0:
        return 0.0
    m3 = np.dot(weights, d**3) / total
    return float(m3 / var**1.5)


def weighted_quantile(values, q, weights) -> float:
    """Weighted quantile with linear interpolation between order statistics.

    Sorted observations are placed at plotting positions
    p_i = (C_i - w_i) / (W - w_i), where C_i is the cumulative weight up to
    and including observation i.  With equal weights this is i/(n-1), the
    convention numpy's 'linear' method uses, so the unweighted case agrees
    with np.quantile bit for bit up to interpolation arithmetic.
    """
    values, weights, total = _check(values, weights)
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"quantile must lie in [0, 1], got {q}")
    order = np.argsort(values, kind="stable")
    v = values[order]
    w = weights[order]
    if len(v) == 1:
        return float(v[0])
    cum = np.cumsum(w)
    denom = total - w
    # A zero-weight singleton cannot happen (total > 0); guard isolated zeros.
    with np.errstate(invalid="ignore", divide="ignore"):
        pos = np.where(denom > 0, (cum - w) / denom, 0.0)
    pos = np.maximum.accumulate(pos)
    return float(np.interp(q, pos, v))


def weighted_median(values, weights) -> float:
    return weighted_quantile(values, 0.5, weights)


def weighted_percentile_of(values, weights, x) -> float:
    """Percentile rank of x in the weighted distribution, in [0, 100].

    Ties at x count half their weight (midpoint convention).
    """
    values, weights, total = _check(values, weights)
    below = weights[values < x].sum()
    at = weights[values == x].sum()
    return float(100.0 * (below + 0.5 * at) / total)


def weighted_mean_se(values, weights) -> float:
    """Standard error of the weighted mean, treating weights as fixed."""
    values, weights, total = _check(values, weights)
    m = np.dot(values, weights) / total
    return float(np.sqrt(np.dot(weights**2, (values - m) ** 2)) / total)

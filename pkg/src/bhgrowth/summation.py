"""Compensated sums and partial-sum growth proxies."""
from __future__ import annotations

import math

import numpy as np


# relative slack that turns a float evaluation of an analytic bound into a safe
# upper bound (covers a few ulps of arithmetic and special-function error)
BOUND_SLACK = 2.0**-40


def round_up(x: float) -> float:
    """Inflate a nonnegative bound computed in floating point."""
    return x * (1.0 + BOUND_SLACK)


def fsum(values) -> float:
    """Correctly rounded sum of a float array (``math.fsum`` on a list)."""
    return math.fsum(np.asarray(values, dtype=float).tolist())


def cumsum(values) -> np.ndarray:
    """Running sums with Neumaier compensation.

    Every prefix carries an error of a few ulps, independent of length.
    """
    out = np.empty(len(values))
    s = 0.0
    c = 0.0
    for i, x in enumerate(np.asarray(values, dtype=float).tolist()):
        t = s + x
        if abs(s) >= abs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
        out[i] = s + c
    return out


def tail_fraction(partials, fraction: float = 0.25) -> float:
    """Relative share of the final total added by the last ``fraction`` of terms.

    Returns ``(P[-1] - P[n - m - 1]) / P[-1]`` with ``m = floor(n * fraction)``.
    """
    p = np.asarray(partials, dtype=float)
    n = len(p)
    m = int(n * fraction)
    if n == 0 or p[-1] == 0.0:
        return 0.0
    if m == 0:
        return 0.0
    before = p[n - m - 1] if n - m - 1 >= 0 else 0.0
    return float((p[-1] - before) / p[-1])


def half_increase(partials) -> float:
    """``(P[n] - P[n/2]) / P[n]``: share of the total contributed by the second half."""
    p = np.asarray(partials, dtype=float)
    n = len(p)
    if n < 2 or p[-1] == 0.0:
        return 0.0
    return float((p[-1] - p[n // 2 - 1]) / p[-1])

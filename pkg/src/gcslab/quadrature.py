"""Adaptive Gauss-Legendre quadrature on a finite interval."""

from functools import lru_cache

import numpy as np

from .errors import QuadratureError


@lru_cache(maxsize=8)
def _rule(order):
    return np.polynomial.legendre.leggauss(order)


def _panel(func, a, b, order):
    x, w = _rule(order)
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    return half * np.sum(w * func(mid + half * x))


def adaptive_gauss_legendre(func, a, b, abs_tol=1e-12, max_subdivisions=60, order=8):
    """Integrate a vectorized real or complex ``func`` over ``[a, b]``.

    Each panel is integrated with an ``order``-point and a ``2*order``-point
    Gauss-Legendre rule; their difference is the local error estimate. Panels
    whose estimate exceeds their share of ``abs_tol`` are bisected.

    Returns
    -------
    value, error_estimate

    Raises
    ------
    QuadratureError
        If more than ``max_subdivisions`` bisections are needed. The exception
        carries the best estimate and its error.
    """
    a = float(a)
    b = float(b)
    if a == b:
        return 0.0, 0.0
    sign = 1.0
    if b < a:
        a, b = b, a
        sign = -1.0
    length = b - a

    pending = [(a, b)]
    total = 0.0
    error = 0.0
    splits = 0
    while pending:
        lo, hi = pending.pop()
        coarse = _panel(func, lo, hi, order)
        fine = _panel(func, lo, hi, 2 * order)
        local = abs(fine - coarse)
        if local <= abs_tol * (hi - lo) / length or hi - lo < 1e-14 * length:
            total += fine
            error += local
            continue
        if splits >= max_subdivisions:
            # account for the unresolved panel and everything still queued
            total += fine
            error += local
            for lo2, hi2 in pending:
                total += _panel(func, lo2, hi2, 2 * order)
            raise QuadratureError(
                f"no convergence after {splits} subdivisions "
                f"(error estimate {error:.3e} > {abs_tol:.1e})",
                estimate=sign * total,
                error=error,
            )
        splits += 1
        mid = 0.5 * (lo + hi)
        pending.append((mid, hi))
        pending.append((lo, mid))
    return sign * total, error

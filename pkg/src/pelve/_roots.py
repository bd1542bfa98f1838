"""Scalar bracketing solvers shared by the calibration routines."""

from __future__ import annotations

import math

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0


def bisect_leftmost(pred, lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Locate the left edge of {x : pred(x)} for a monotone predicate.

    pred must be False at lo and True at hi, and switch once in between.
    Returns the final bracket (lo, hi) with hi - lo < tol; lo is the
    conservative "leftmost" estimate, hi the first point known to satisfy
    the predicate.
    """
    while hi - lo >= tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


def golden_section(fn, a: float, b: float, tol: float = 1e-12, max_iter: int = 200) -> tuple[float, float]:
    """Minimize a unimodal scalar function on [a, b].

    Returns (x, fn(x)) at the best point found once the bracket width
    falls below tol.
    """
    dist = b - a
    if dist <= tol:
        x = 0.5 * (a + b)
        return x, fn(x)
    c = a + _INV_PHI_SQ * dist
    d = a + _INV_PHI * dist
    yc = fn(c)
    yd = fn(d)
    for _ in range(max_iter):
        if dist <= tol:
            break
        if yc < yd:
            b, d, yd = d, c, yc
            dist = _INV_PHI * dist
            c = a + _INV_PHI_SQ * dist
            yc = fn(c)
        else:
            a, c, yc = c, d, yd
            dist = _INV_PHI * dist
            d = a + _INV_PHI * dist
            yd = fn(d)
    return (c, yc) if yc < yd else (d, yd)

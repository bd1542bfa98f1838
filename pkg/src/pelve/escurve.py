"""Executable ES-curve calculus.

A function f on (0, 1] is the ES curve of some integrable payoff exactly
when the scaled curve F(t) = t*f(t) vanishes at 0+ and -F' is increasing
(outside a null set).  This module validates tabulated curves against a
discrete form of that characterization, constructs a risk from a valid
closed-form curve via the quantile q(t) = -f(t) - t*f'(t), classifies
curve shapes, and builds the two-curve fixture on which the weighted
least-squares calibration provably has a whole interval of minimizers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._roots import bisect_leftmost
from .measures import EsCurveTable
from .risks import DomainError, EsCurveRisk, TabulatedEsCurveRisk

DEFAULT_CURVE_TOL = 1e-8


class CurveShapeError(ValueError):
    """A closed-form curve violates the shape preconditions of a construction."""


@dataclass(frozen=True)
class CurveViolation:
    """One violated validity condition, located on the curve grid."""

    condition: str  # "origin" or "slope"
    level: float
    detail: str


@dataclass(frozen=True)
class CurveValidation:
    """Accept/reject verdict for a tabulated curve, with reasons."""

    accepted: bool
    violations: tuple[CurveViolation, ...]

    def reasons(self) -> list[str]:
        return [f"{v.condition} condition fails near level {v.level:.6g}: {v.detail}" for v in self.violations]


@dataclass(frozen=True)
class ShapeClass:
    """Shape of a valid ES curve: strictly decreasing, or flat then strictly decreasing."""

    kind: str  # "strictly_decreasing" | "constant_then_strictly_decreasing" | "invalid"
    breakpoint: float | None = None


def validate_es_curve(table: EsCurveTable, tol: float = DEFAULT_CURVE_TOL) -> CurveValidation:
    """Check a tabulated curve against the discrete ES-curve characterization.

    Accepts iff (i) the linear extrapolation of the scaled curve t*f(t)
    to t = 0 vanishes within tol, and (ii) the forward-difference slopes
    of -t*f(t), which estimate the implied quantile, are increasing up
    to tol.  Both tolerances are relative to the curve's own magnitude,
    and the origin condition can only be resolved down to the curvature
    the first grid step can witness, so tol should reflect the grid
    resolution at the head.  Rejections carry the violated condition and
    its location.
    """
    if len(table) < 3:
        raise DomainError("curve validation needs at least three grid points")
    t = table.levels
    big_f = t * table.values
    violations: list[CurveViolation] = []

    slope01 = (big_f[1] - big_f[0]) / (t[1] - t[0])
    origin = big_f[0] - t[0] * slope01
    if abs(origin) > tol * (1.0 + float(np.max(np.abs(big_f)))):
        violations.append(
            CurveViolation(
                condition="origin",
                level=float(t[0]),
                detail=f"t*f(t) extrapolates to {origin:.3e} at 0, not 0",
            )
        )

    quantile_est = -np.diff(big_f) / np.diff(t)
    drops = np.diff(quantile_est)
    bad = np.nonzero(drops < -tol * (1.0 + float(np.max(np.abs(quantile_est)))))[0]
    for j in bad:
        violations.append(
            CurveViolation(
                condition="slope",
                level=float(t[j + 1]),
                detail=f"implied quantile decreases by {-drops[j]:.3e}",
            )
        )
    return CurveValidation(accepted=not violations, violations=tuple(violations))


def classify_shape(table: EsCurveTable, tol: float = DEFAULT_CURVE_TOL) -> ShapeClass:
    """Detect the maximal initial constant segment and verify strict decrease after it.

    Valid ES curves are either strictly decreasing everywhere or constant
    up to a breakpoint and strictly decreasing afterwards; anything else
    (a flat or increasing stretch after a decrease) is classified invalid.
    """
    v = table.values
    t = table.levels
    scale = tol * (1.0 + float(np.max(np.abs(v))))
    diffs = np.diff(v)

    head = 0
    while head < diffs.size and abs(diffs[head]) <= scale:
        head += 1
    if head == diffs.size:
        return ShapeClass(kind="constant_then_strictly_decreasing", breakpoint=1.0)
    if np.any(diffs[head:] >= -scale):
        return ShapeClass(kind="invalid")
    if head == 0:
        return ShapeClass(kind="strictly_decreasing")
    return ShapeClass(kind="constant_then_strictly_decreasing", breakpoint=float(t[head]))


_SHAPE_GRID = np.linspace(1e-4, 1.0, 1000)


def quantile_from_es_curve(f, fprime, validate: bool = True) -> EsCurveRisk:
    """Risk whose upper quantile is q(t) = -f(t) - t*f'(t).

    Requires f decreasing and concave on (0, 1] (checked numerically on a
    fixed grid); re-deriving the ES curve of the returned risk reproduces
    f up to quadrature tolerance.
    """
    if validate:
        t = _SHAPE_GRID
        fv = np.asarray(f(t), dtype=float)
        fp = np.asarray(fprime(t), dtype=float)
        scale = 1e-12 * (1.0 + float(np.max(np.abs(fv))))
        rises = np.diff(fv)
        if np.any(rises > scale):
            j = int(np.argmax(rises))
            raise CurveShapeError(f"curve is not decreasing near t={t[j]:.6g}")
        dscale = 1e-12 * (1.0 + float(np.max(np.abs(fp))))
        kinks = np.diff(fp)
        if np.any(kinks > dscale):
            j = int(np.argmax(kinks))
            raise CurveShapeError(f"curve is not concave near t={t[j]:.6g}")
    return EsCurveRisk(f, fprime)


def risk_from_table(table: EsCurveTable) -> TabulatedEsCurveRisk:
    """Risk backed by a tabulated curve (piecewise-linear scaled curve)."""
    return TabulatedEsCurveRisk(table.levels, table.values)


def table_from_risk(risk, levels) -> EsCurveTable:
    """Tabulate the defining curve of an ES-curve risk on a grid."""
    grid = np.asarray(levels, dtype=float)
    return EsCurveTable(levels=grid, values=np.asarray(risk.es_level(grid), dtype=float))


@dataclass(frozen=True)
class MseCounterexample:
    """The two ES-curve risks of the non-uniqueness fixture, plus derived anchors.

    The weighted least-squares objective with weights (omega1, 1-omega1)
    at level lam is constant on the level interval [s, u], i.e. on the
    multiplier interval [s/lam, u/lam], where its value is
    sqrt(omega1 * c).
    """

    first: EsCurveRisk
    second: EsCurveRisk
    lam: float
    plateau_levels: tuple[float, float]
    objective_on_plateau: float
    t_g_star: float
    var_first: float
    var_second: float


def build_mse_counterexample(
    lam: float = 1.0 / 3.0,
    c: float = 0.1,
    d: float = 0.8,
    omega1: float = 0.4,
    eps: float = 0.05,
    s: float = 0.66,
    u: float = 0.74,
    w: float = 0.25,
) -> MseCounterexample:
    """Construct the two-curve fixture with a flat least-squares minimum.

    The second curve is g(t) = 1 - t^2.  The first curve is glued from a
    constant head, a hyperbolic arc a/t + d (so its VaR at lam is exactly
    d), a tangent line, the arc that balances the two squared gaps to the
    constant omega1 * c, and a final tangent line.  Every parameter
    constraint is validated and violations name the failed inequality.
    """
    if not 0.0 < eps < lam < 1.0:
        raise DomainError("need 0 < eps < lam < 1")
    if not 0.0 < omega1 < 1.0:
        raise DomainError("need omega1 in (0, 1)")
    if not 0.0 < w < 1.0:
        raise DomainError("need w in (0, 1)")
    if c <= 0.0:
        raise DomainError("need c > 0")
    if not 0.0 < d < 1.0:
        raise DomainError("need d in (0, 1)")
    omega2 = 1.0 - omega1
    ratio = omega2 / omega1

    def g(t):
        return 1.0 - np.asarray(t, dtype=float) ** 2

    def gp(t):
        return -2.0 * np.asarray(t, dtype=float)

    var_g = float(g(lam) + lam * gp(lam))
    # level at which g falls to its VaR value; g is strictly decreasing
    _, t_g_star = bisect_leftmost(lambda t: float(g(t)) <= var_g, 1e-12, 1.0, 1e-14)

    if not t_g_star < u <= 1.0:
        raise DomainError("need u in (t_g_star, 1]")
    if not t_g_star < s < u:
        raise DomainError("need s in (t_g_star, u)")
    slack = c - ratio * (float(g(u)) - var_g) ** 2
    if slack <= 0.0:
        raise DomainError("need c - (omega2/omega1)*(g(u) - g(lam) - lam*g'(lam))^2 > 0")

    def f_arc(t):
        # clipped below; the arc is only ever selected on [s, u] where
        # the radicand stays above the validated slack
        t = np.asarray(t, dtype=float)
        inside = np.maximum(c - ratio * (g(t) - var_g) ** 2, 0.0)
        return d + np.sqrt(inside)

    def f_arc_prime(t):
        t = np.asarray(t, dtype=float)
        inside = np.maximum(c - ratio * (g(t) - var_g) ** 2, 1e-300)
        return -ratio * (g(t) - var_g) * gp(t) / np.sqrt(inside)

    arc_s = float(f_arc(s))
    arc_sp = float(f_arc_prime(s))
    arc_u = float(f_arc(u))
    arc_up = float(f_arc_prime(u))
    t_mixed = w * (lam - eps) + (1.0 - w) * s
    a = t_mixed * (arc_sp * t_mixed + arc_s - arc_sp * s - d)

    knee = lam - eps

    def f(t):
        t = np.asarray(t, dtype=float)
        return np.select(
            [t < knee, t < t_mixed, t < s, t < u],
            [
                a / knee + d,
                a / t + d,
                arc_sp * (t - s) + arc_s,
                f_arc(t),
            ],
            default=arc_up * (t - u) + arc_u,
        )

    def fp(t):
        # one-sided right derivatives at the gluing knots
        t = np.asarray(t, dtype=float)
        return np.select(
            [t < knee, t < t_mixed, t < s, t < u],
            [0.0, -a / t**2, arc_sp, f_arc_prime(t)],
            default=arc_up,
        )

    first = EsCurveRisk(f, fp)
    second = EsCurveRisk(g, gp)
    return MseCounterexample(
        first=first,
        second=second,
        lam=lam,
        plateau_levels=(s, u),
        objective_on_plateau=math.sqrt(omega1 * c),
        t_g_star=t_g_star,
        var_first=d,
        var_second=var_g,
    )

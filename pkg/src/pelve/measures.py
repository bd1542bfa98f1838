"""Value-at-Risk and Expected Shortfall for any risk object.

VaR at level lam is the negated upper quantile; ES at level lam is the
average of VaR over (0, lam].  Empirical risks get the exact piecewise
integral of their step quantile, ES-curve risks read the curve directly,
and parametric families use closed forms where they exist (normal,
Pareto, GPD, constant) and adaptive quadrature of the quantile function
otherwise.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .risks import (
    Constant,
    DomainError,
    EmpiricalRisk,
    EsCurveRisk,
    GpdLoss,
    Normal,
    ParetoLoss,
    TabulatedEsCurveRisk,
)

#: absolute-plus-relative tolerance target of the quadrature engine
QUAD_TOL = 1e-10

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


@dataclass(frozen=True)
class ReserveStat:
    """A matched (VaR, ES) pair at one level, in currency units."""

    var_value: float
    es_value: float
    level: float

    def __post_init__(self):
        if self.es_value < self.var_value - 1e-9 * (1.0 + abs(self.var_value)):
            raise DomainError("ES below VaR at the same level is impossible")


@dataclass(frozen=True)
class EsCurveTable:
    """Tabulated level -> ES mapping on strictly increasing levels in (0, 1]."""

    levels: np.ndarray
    values: np.ndarray
    derivatives: np.ndarray | None = None

    def __post_init__(self):
        t = np.asarray(self.levels, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.size < 1 or t.shape != v.shape:
            raise DomainError("levels and values must be aligned 1-d arrays")
        if np.any(np.diff(t) <= 0):
            raise DomainError("levels must be strictly increasing")
        if t[0] <= 0.0 or t[-1] > 1.0:
            raise DomainError("levels must lie in (0, 1]")
        object.__setattr__(self, "levels", t)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.levels.size


def _check_var_level(lam: float) -> float:
    lam = float(lam)
    if not 0.0 < lam < 1.0:
        raise DomainError("VaR level must lie in (0, 1)")
    return lam


def _check_es_level(lam: float) -> float:
    lam = float(lam)
    if not 0.0 < lam <= 1.0:
        raise DomainError("ES level must lie in (0, 1]")
    return lam


def var(risk, lam: float) -> float:
    """Value-at-Risk of the payoff at level lam: -q_X^+(lam)."""
    lam = _check_var_level(lam)
    return -float(risk.upper_quantile(lam))


def _empirical_quantile_integral(risk: EmpiricalRisk, lam) -> np.ndarray:
    """Exact integral of the step quantile of an empirical risk over (0, lam]."""
    m = risk.size
    lam = np.asarray(lam, dtype=float)
    k = np.floor(m * lam).astype(int)
    k = np.minimum(k, m)
    full = risk._prefix[k] / m
    rest = (lam - k / m) * risk.samples[np.minimum(k, m - 1)]
    # at lam == k/m the residual vanishes, giving the closed-interval sum
    return full + np.where(k < m, rest, 0.0)


def _quantile_integral_quad(risk, lam: float) -> float:
    """Adaptive integral of the upper quantile over (0, lam].

    Substitutes u = lam * exp(-v) so that power-law singularities of the
    quantile at 0 become exponentially damped, then integrates over
    v in (0, inf) to QUAD_TOL absolute-plus-relative accuracy.
    """

    def integrand(v):
        u = lam * math.exp(-v)
        if u <= 0.0:  # underflow far in the tail; the integrand limit is 0
            return 0.0
        return float(risk.upper_quantile(u)) * u

    value, _ = integrate.quad(integrand, 0.0, np.inf, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200)
    return value


def _closed_form_es(risk, lam: float) -> float | None:
    """Closed-form ES where available, else None."""
    if isinstance(risk, Constant):
        return -risk.value
    if isinstance(risk, Normal):
        z = special.ndtri(lam)
        return -risk.mu + risk.sigma * math.exp(-0.5 * z * z) / (lam * math.sqrt(2.0 * math.pi))
    if isinstance(risk, ParetoLoss):
        g = risk.gamma
        return risk.scale * g / (g - 1.0) * lam ** (-1.0 / g)
    if isinstance(risk, GpdLoss):
        if risk.xi == 0.0:
            return risk.nu + risk.beta * (1.0 - math.log(lam))
        return risk.nu + risk.beta * (lam ** (-risk.xi) / (1.0 - risk.xi) - 1.0) / risk.xi
    return None


def es(risk, lam: float) -> float:
    """Expected Shortfall of the payoff at level lam: (1/lam) * int_0^lam VaR_u du."""
    lam = _check_es_level(lam)
    closed = _closed_form_es(risk, lam)
    if closed is not None:
        return closed
    if isinstance(risk, (EsCurveRisk, TabulatedEsCurveRisk)):
        return float(risk.es_level(lam))
    if isinstance(risk, EmpiricalRisk):
        return -float(_empirical_quantile_integral(risk, lam)) / lam
    return -_quantile_integral_quad(risk, lam) / lam


def es_many(risk, levels) -> np.ndarray:
    """ES at an ascending grid of levels, sharing work across the grid.

    Quadrature-backed risks pay one adaptive integral for the head
    segment (0, levels[0]] and fixed Gauss-Legendre panels between
    consecutive grid points, accumulated once; everything else
    vectorizes directly.
    """
    grid = np.asarray(levels, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("levels must be a nonempty 1-d array")
    if np.any(grid <= 0.0) or np.any(grid > 1.0):
        raise DomainError("ES levels must lie in (0, 1]")
    if np.any(np.diff(grid) <= 0):
        raise DomainError("levels must be strictly increasing")

    if isinstance(risk, EmpiricalRisk):
        return -_empirical_quantile_integral(risk, grid) / grid
    if isinstance(risk, (EsCurveRisk, TabulatedEsCurveRisk)):
        return np.asarray(risk.es_level(grid), dtype=float)
    if _closed_form_es(risk, float(grid[0])) is not None:
        return np.array([_closed_form_es(risk, float(p)) for p in grid])

    ends_at_one = grid[-1] > 1.0 - 1e-12
    head = _quantile_integral_quad(risk, float(grid[0]))
    if grid.size == 1:
        integral = risk.mean() if ends_at_one else head
        return np.array([-integral / grid[0]])
    lo = grid[:-1]
    hi = grid[1:]
    if ends_at_one:
        # quantiles of two-sided or loss families can be singular at u -> 1;
        # the full integral is the mean exactly, so the last panel needs no rule
        lo, hi = lo[:-1], hi[:-1]
    pieces = np.zeros(0)
    if lo.size:
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        nodes = mid[:, None] + half[:, None] * _GL_NODES[None, :]
        values = np.asarray(risk.upper_quantile(nodes.ravel()), dtype=float).reshape(nodes.shape)
        pieces = half * (values @ _GL_WEIGHTS)
    integrals = head + np.concatenate(([0.0], np.cumsum(pieces)))
    if ends_at_one:
        integrals = np.concatenate((integrals, [risk.mean()]))
    return -integrals / grid


def es_curve(risk, levels) -> EsCurveTable:
    """Tabulate the ES curve of a risk on a strictly increasing grid."""
    grid = np.asarray(levels, dtype=float)
    return EsCurveTable(levels=grid, values=es_many(risk, grid))


def reserve_stat(risk, lam: float) -> ReserveStat:
    """Matched VaR/ES pair at one level."""
    return ReserveStat(var_value=var(risk, lam), es_value=es(risk, lam), level=float(lam))


def write_es_table(path, table: EsCurveTable) -> None:
    """Serialize a curve table to CSV with columns level,es at 17 significant digits."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["level", "es"])
        for t, v in zip(table.levels, table.values):
            writer.writerow([f"{t:.17g}", f"{v:.17g}"])


def read_es_table(path) -> EsCurveTable:
    """Read a level,es CSV back into a curve table."""
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["level", "es"]:
            raise DomainError(f"{path}: expected a level,es header")
        rows = [(float(r[0]), float(r[1])) for r in reader if r]
    if not rows:
        raise DomainError(f"{path}: no data rows")
    levels, values = zip(*rows)
    return EsCurveTable(levels=np.asarray(levels), values=np.asarray(values))

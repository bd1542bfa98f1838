"""Multi-agent PELVE methods: how a regulator picks one ES level for n agents.

Four calibration rules over a vector of payoffs at a common VaR level:

* average:    weighted mean of the individual PELVE values;
* worst-case: smallest multiplier acceptable to every agent at once,
  which equals the componentwise maximum;
* mse:        minimizer of the weighted root-mean-square gap between the
  new ES and the old VaR values (non-unique in general, so the full
  minimizing plateau is reported);
* systemic:   smallest multiplier at which an aggregate of the ES values
  stops exceeding the same aggregate of the VaR values.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from ._roots import bisect_leftmost, golden_section
from .core import DEFAULT_TOL, pelve
from .measures import es, es_many, var
from .risks import DomainError

DEFAULT_GRID_SIZE = 2048
DEFAULT_PLATEAU_TOL = 1e-9

#: admissible aggregation functions for the systemic method
AGGREGATIONS = {
    "identity": lambda x: x,
    "positive_part": lambda x: x if x > 0.0 else 0.0,
}


@dataclass(frozen=True)
class MsePelveResult:
    """Leftmost minimizer, minimizing plateau and attained objective value."""

    leftmost: float
    plateau: tuple[float, float]
    objective_at_min: float


def check_weights(weights, n: int) -> np.ndarray:
    """Validate a weight vector on the n-simplex."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size != n:
        raise DomainError(f"expected {n} weights, got shape {w.shape}")
    if np.any(w < 0.0) or np.any(w > 1.0):
        raise DomainError("weights must lie in [0, 1]")
    if abs(float(w.sum()) - 1.0) > 1e-12:
        raise DomainError("weights must sum to 1 within 1e-12")
    return w


def equal_weights(n: int) -> np.ndarray:
    """Uniform weights over n agents."""
    if n < 1:
        raise DomainError("need at least one agent")
    return np.full(n, 1.0 / n)


def _check_risks(risks) -> list:
    risks = list(risks)
    if len(risks) < 1:
        raise DomainError("need at least one risk")
    return risks


def a_pelve(risks, lam: float, weights, tol: float = DEFAULT_TOL) -> float:
    """Weighted average of the individual PELVE values.

    Infinite whenever a component with positive weight has infinite PELVE.
    """
    risks = _check_risks(risks)
    w = check_weights(weights, len(risks))
    total = 0.0
    for wi, risk in zip(w, risks):
        if wi == 0.0:
            continue
        ci = pelve(risk, lam, tol)
        if math.isinf(ci):
            return math.inf
        total += wi * ci
    return total


def wc_pelve(risks, lam: float, tol: float = DEFAULT_TOL) -> float:
    """Worst-case method: the maximum of the individual PELVE values."""
    risks = _check_risks(risks)
    return max(pelve(risk, lam, tol) for risk in risks)


def wc_pelve_from_definition(risks, lam: float, tol: float = DEFAULT_TOL) -> float:
    """Worst-case method computed from its defining joint constraint.

    Searches for the smallest c in [1, 1/lam] such that every component
    satisfies ES_{c lam} <= VaR_lam; agrees with wc_pelve up to solver
    tolerance.
    """
    risks = _check_risks(risks)
    if not 0.0 < lam < 1.0:
        raise DomainError("level must lie in (0, 1)")
    vars_ = [var(risk, lam) for risk in risks]
    worst = max(-risk.mean() - v for risk, v in zip(risks, vars_))
    if worst > tol:
        return math.inf

    def excess(c: float) -> float:
        p = min(1.0, c * lam)
        return max(es(risk, p) - v for risk, v in zip(risks, vars_))

    if excess(1.0) <= 0.0:
        return 1.0
    hi = 1.0 / lam
    if excess(hi) > 0.0:
        return hi
    lo, _ = bisect_leftmost(lambda c: excess(c) <= 0.0, 1.0, hi, tol)
    return lo


def mse_pelve(
    risks,
    lam: float,
    weights,
    grid_size: int = DEFAULT_GRID_SIZE,
    plateau_tol: float = DEFAULT_PLATEAU_TOL,
) -> MsePelveResult:
    """Global minimizer of the weighted root-mean-square ES-VaR gap.

    Scans a uniform grid of multipliers over [1, 1/lam], refines the best
    grid point by golden section between its neighbors, then reports the
    maximal contiguous interval around the minimizer on which the
    objective stays within plateau_tol * (1 + minimum) of the minimum.
    The leftmost plateau endpoint is the canonical value.
    """
    risks = _check_risks(risks)
    w = check_weights(weights, len(risks))
    if not 0.0 < lam < 1.0:
        raise DomainError("level must lie in (0, 1)")
    if grid_size < 64:
        raise DomainError("grid_size must be at least 64")

    vars_ = np.array([var(risk, lam) for risk in risks])
    cs = np.linspace(1.0, 1.0 / lam, grid_size)
    p_grid = np.minimum(cs * lam, 1.0)
    es_grid = np.vstack([es_many(risk, p_grid) for risk in risks])
    objective_grid = np.sqrt(w @ (es_grid - vars_[:, None]) ** 2)

    def objective(c: float) -> float:
        p = min(1.0, c * lam)
        gaps = np.array([es(risk, p) for risk in risks]) - vars_
        return float(math.sqrt(w @ gaps**2))

    k = int(np.argmin(objective_grid))
    lo_idx, hi_idx = max(k - 1, 0), min(k + 1, grid_size - 1)
    c_star, j_star = golden_section(objective, float(cs[lo_idx]), float(cs[hi_idx]))
    if objective_grid[k] < j_star:
        c_star, j_star = float(cs[k]), float(objective_grid[k])
    threshold = j_star + plateau_tol * (1.0 + j_star)

    edge_tol = 1e-12 * (1.0 / lam - 1.0 + 1.0)
    left = _plateau_edge(objective, objective_grid, cs, c_star, threshold, edge_tol, side=-1)
    right = _plateau_edge(objective, objective_grid, cs, c_star, threshold, edge_tol, side=+1)
    return MsePelveResult(leftmost=left, plateau=(left, right), objective_at_min=j_star)


def _plateau_edge(objective, grid_values, cs, c_star, threshold, edge_tol, side) -> float:
    """Edge of the minimizing plateau, expanding from the refined minimizer.

    Walks grid points contiguously while they stay under the threshold,
    then pins the crossing between the last point inside and the first
    outside by bisection; the returned edge is the innermost bracket
    endpoint, so the reported plateau is conservative.
    """
    n = cs.size
    if side < 0:
        anchor = int(np.searchsorted(cs, c_star, side="right")) - 1
    else:
        anchor = int(np.searchsorted(cs, c_star, side="left"))

    inside = c_star
    i = anchor
    while 0 <= i < n and grid_values[i] <= threshold:
        inside = float(cs[i])
        i += side
    if i < 0:
        return float(cs[0])
    if i >= n:
        return float(cs[-1])
    outside = float(cs[i])

    if side < 0:
        _, first_inside = bisect_leftmost(lambda c: objective(c) <= threshold, outside, inside, edge_tol)
        return first_inside
    last_inside, _ = bisect_leftmost(lambda c: objective(c) > threshold, inside, outside, edge_tol)
    return last_inside


def sys_pelve(risks, lam: float, g: str = "positive_part", tol: float = DEFAULT_TOL) -> float:
    """Systemic method: smallest c with sum g(ES_{c lam}) <= sum g(VaR_lam).

    g is "identity" or "positive_part"; the positive part blocks
    cross-subsidization between agents.  Infinite when even the level-1
    aggregate (built from the means) stays above the VaR aggregate by
    more than tol.  The constraint is accepted with tol slack so flat
    stretches of the aggregate still yield the leftmost multiplier.
    """
    risks = _check_risks(risks)
    if not 0.0 < lam < 1.0:
        raise DomainError("level must lie in (0, 1)")
    try:
        gf = AGGREGATIONS[g]
    except KeyError:
        raise DomainError(f"unknown aggregation {g!r}; use one of {sorted(AGGREGATIONS)}") from None

    rhs = sum(gf(var(risk, lam)) for risk in risks)

    def excess(c: float) -> float:
        p = min(1.0, c * lam)
        return sum(gf(es(risk, p)) for risk in risks) - rhs

    hi = 1.0 / lam
    if excess(hi) > tol:
        return math.inf
    if excess(1.0) <= tol:
        return 1.0
    lo, _ = bisect_leftmost(lambda c: excess(c) <= tol, 1.0, hi, tol)
    return lo


def _weighted_average(values: np.ndarray, weights: np.ndarray) -> float:
    """Weighted mean treating zero-weight infinities as absent."""
    if np.any(np.isinf(values[weights > 0.0])):
        return math.inf
    return float(np.sum(np.where(weights > 0.0, weights * np.where(np.isinf(values), 0.0, values), 0.0)))


METHOD_COLUMNS = ("a", "a_weighted", "wc", "mse", "mse_weighted", "sys")


def multi_pelve_curves(
    risks,
    levels,
    a_weights,
    mse_weights,
    g: str = "positive_part",
    tol: float = DEFAULT_TOL,
    grid_size: int = DEFAULT_GRID_SIZE,
) -> dict[str, np.ndarray]:
    """All six method curves over a level grid.

    The unweighted columns use equal weights; "a_weighted" uses
    a_weights and "mse_weighted" uses mse_weights.
    """
    risks = _check_risks(risks)
    n = len(risks)
    grid = np.asarray(levels, dtype=float)
    eq = equal_weights(n)
    aw = check_weights(a_weights, n)
    mw = check_weights(mse_weights, n)
    out = {name: np.empty(grid.size) for name in METHOD_COLUMNS}
    for j, lam in enumerate(grid):
        lam = float(lam)
        singles = np.array([pelve(risk, lam, tol) for risk in risks])
        out["a"][j] = _weighted_average(singles, eq)
        out["a_weighted"][j] = _weighted_average(singles, aw)
        out["wc"][j] = float(np.max(singles))
        out["mse"][j] = mse_pelve(risks, lam, eq, grid_size=grid_size).leftmost
        out["mse_weighted"][j] = mse_pelve(risks, lam, mw, grid_size=grid_size).leftmost
        out["sys"][j] = sys_pelve(risks, lam, g=g, tol=tol)
    return out


def write_multi_curves(path, levels, columns: dict[str, np.ndarray]) -> None:
    """Serialize method curves to CSV: level,a,a_weighted,wc,mse,mse_weighted,sys."""
    grid = np.asarray(levels, dtype=float)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["level", *METHOD_COLUMNS])
        for j, lam in enumerate(grid):
            row = [f"{lam:.17g}"]
            for name in METHOD_COLUMNS:
                value = float(columns[name][j])
                row.append("inf" if math.isinf(value) else f"{value:.17g}")
            writer.writerow(row)

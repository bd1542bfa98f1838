"""The single-agent PELVE: the smallest ES-level multiplier matching a VaR.

For a payoff X and VaR level lam, the PELVE is the smallest c in
[1, 1/lam] with ES_{c*lam}(X) <= VaR_lam(X); by convention it is
infinite when no such multiplier exists, which happens exactly when
E[-X] exceeds VaR_lam(X).  Finite values are plain floats and the
infinite case is math.inf.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from ._roots import bisect_leftmost
from .measures import es, var
from .risks import DomainError

#: default solver tolerance, in units of the multiplier c
DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class PelveCurve:
    """PELVE values over a grid of VaR levels, plus the solver tolerance used."""

    levels: np.ndarray
    values: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        t = np.asarray(self.levels, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.shape != v.shape or t.ndim != 1:
            raise DomainError("levels and values must be aligned 1-d arrays")
        object.__setattr__(self, "levels", t)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.levels.size


@dataclass(frozen=True)
class Jump:
    """A detected discontinuity between two adjacent curve grid points."""

    level_left: float
    level_right: float
    value_left: float
    value_right: float

    @property
    def gap(self) -> float:
        return abs(self.value_right - self.value_left)


def pelve(risk, lam: float, tol: float = DEFAULT_TOL) -> float:
    """Smallest c in [1, 1/lam] with ES at level c*lam below VaR at level lam.

    Infinite (math.inf) when E[-X] exceeds VaR_lam(X) by more than tol;
    otherwise located by bisection on the decreasing map
    c -> ES_{c lam}(X) - VaR_lam(X), returning the lower bracket endpoint
    once the bracket is narrower than tol.
    """
    if not 0.0 < lam < 1.0:
        raise DomainError("PELVE level must lie in (0, 1)")
    if tol <= 0.0:
        raise DomainError("tol must be positive")
    v = var(risk, lam)
    if -risk.mean() - v > tol:
        return math.inf
    if es(risk, lam) - v <= 0.0:
        return 1.0
    hi = 1.0 / lam
    if es(risk, min(1.0, hi * lam)) - v > 0.0:
        # existence holds only within tol: the boundary multiplier is the answer
        return hi
    lo, _ = bisect_leftmost(lambda c: es(risk, c * lam) - v <= 0.0, 1.0, hi, tol)
    return lo


def pelve_curve(risk, levels, tol: float = DEFAULT_TOL) -> PelveCurve:
    """PELVE at each level of an increasing grid within (0, 1)."""
    grid = np.asarray(levels, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("levels must be a nonempty 1-d array")
    if np.any(np.diff(grid) <= 0):
        raise DomainError("levels must be strictly increasing")
    values = np.array([pelve(risk, float(lam), tol) for lam in grid])
    return PelveCurve(levels=grid, values=values, tol=tol)


def continuity_diagnostic(curve: PelveCurve, jump_threshold: float) -> list[Jump]:
    """Adjacent grid pairs whose PELVE difference exceeds the threshold.

    A transition between a finite and an infinite value always counts as
    a jump; two adjacent infinite values do not.
    """
    if len(curve) < 2:
        raise DomainError("continuity diagnostic needs at least two grid points")
    jumps: list[Jump] = []
    t, v = curve.levels, curve.values
    for i in range(len(curve) - 1):
        a, b = float(v[i]), float(v[i + 1])
        if math.isinf(a) and math.isinf(b):
            continue
        if math.isinf(a) or math.isinf(b) or abs(b - a) > jump_threshold:
            jumps.append(Jump(float(t[i]), float(t[i + 1]), a, b))
    return jumps


def write_pelve_curve(path, curve: PelveCurve) -> None:
    """Serialize a PELVE curve to CSV columns level,pelve with an "inf" sentinel."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["level", "pelve"])
        for lam, value in zip(curve.levels, curve.values):
            text = "inf" if math.isinf(value) else f"{value:.17g}"
            writer.writerow([f"{lam:.17g}", text])


def read_pelve_curve(path, tol: float = DEFAULT_TOL) -> PelveCurve:
    """Read a level,pelve CSV back into a curve."""
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["level", "pelve"]:
            raise DomainError(f"{path}: expected a level,pelve header")
        rows = [(float(r[0]), math.inf if r[1].strip() == "inf" else float(r[1])) for r in reader if r]
    if not rows:
        raise DomainError(f"{path}: no data rows")
    levels, values = zip(*rows)
    return PelveCurve(levels=np.asarray(levels), values=np.asarray(values), tol=tol)

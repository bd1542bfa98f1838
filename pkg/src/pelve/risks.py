"""Risk objects: payoff distributions exposed through an upper quantile function.

Every risk in this package models a *payoff* X (losses are negated payoffs)
and exposes two primitives that everything else consumes:

``upper_quantile(u)``
    The right-continuous increasing inverse of the CDF, q_X^+(u), for
    u in (0, 1).  Accepts scalars or numpy arrays.

``mean()``
    E[X].  Risks with an infinite first moment are rejected at
    construction, so mean() always returns a finite number.

Three kinds of risks exist: empirical (sorted samples), parametric
(named families, payoff- or loss-oriented), and risks defined directly
by their Expected-Shortfall curve.
"""

from __future__ import annotations

import csv
import math

import numpy as np
from scipy import special


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class InfiniteMeanError(ValueError):
    """Distribution parameters imply an infinite first moment."""


def _check_unit_open(u, name: str = "u") -> np.ndarray | float:
    """Validate u in (0,1), scalar or array."""
    arr = np.asarray(u, dtype=float)
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise DomainError(f"{name} must lie in the open interval (0, 1)")
    return u


class EmpiricalRisk:
    """Discrete payoff distribution putting mass 1/m on each sample.

    The upper quantile is the right-continuous step function
    ``q(u) = samples[floor(m * u)]`` (0-indexed order statistics), so at
    a grid point k/m the value jumps to the (k+1)-th order statistic.
    """

    def __init__(self, samples):
        arr = np.sort(np.asarray(samples, dtype=float).ravel())
        if arr.size < 1:
            raise DomainError("empirical risk needs at least one sample")
        if not np.all(np.isfinite(arr)):
            raise DomainError("samples must be finite")
        self.samples = arr
        self.size = arr.size
        # prefix sums of order statistics, used for exact ES integrals
        self._prefix = np.concatenate(([0.0], np.cumsum(arr)))

    def upper_quantile(self, u):
        _check_unit_open(u)
        idx = np.minimum((np.asarray(u) * self.size).astype(int), self.size - 1)
        out = self.samples[idx]
        return float(out) if np.isscalar(u) else out

    def mean(self) -> float:
        return float(self._prefix[-1] / self.size)

    def __repr__(self) -> str:
        return f"EmpiricalRisk(m={self.size})"


class Constant:
    """Degenerate payoff equal to ``value`` with probability one."""

    def __init__(self, value: float):
        if not math.isfinite(value):
            raise DomainError("constant payoff must be finite")
        self.value = float(value)

    def upper_quantile(self, u):
        _check_unit_open(u)
        return self.value if np.isscalar(u) else np.full(np.shape(u), self.value)

    def mean(self) -> float:
        return self.value

    def __repr__(self) -> str:
        return f"Constant({self.value!r})"


class Normal:
    """Normal payoff N(mu, sigma^2)."""

    def __init__(self, mu: float, sigma: float):
        if sigma <= 0:
            raise DomainError("sigma must be positive")
        self.mu = float(mu)
        self.sigma = float(sigma)

    def upper_quantile(self, u):
        _check_unit_open(u)
        return self.mu + self.sigma * special.ndtri(u)

    def mean(self) -> float:
        return self.mu

    def __repr__(self) -> str:
        return f"Normal(mu={self.mu!r}, sigma={self.sigma!r})"


class StudentT:
    """Location-scale Student-t payoff; dof > 1 so the mean exists."""

    def __init__(self, dof: float, mu: float = 0.0, sigma: float = 1.0):
        if dof <= 0:
            raise DomainError("degrees of freedom must be positive")
        if dof <= 1:
            raise InfiniteMeanError("Student-t with dof <= 1 has no mean")
        if sigma <= 0:
            raise DomainError("sigma must be positive")
        self.dof = float(dof)
        self.mu = float(mu)
        self.sigma = float(sigma)

    def upper_quantile(self, u):
        _check_unit_open(u)
        return self.mu + self.sigma * special.stdtrit(self.dof, u)

    def mean(self) -> float:
        return self.mu

    def __repr__(self) -> str:
        return f"StudentT(dof={self.dof!r}, mu={self.mu!r}, sigma={self.sigma!r})"


class _LossRisk:
    """Base for loss-oriented families: Y is the loss, the payoff is X = -Y.

    The payoff quantile follows from q_X^+(u) = -q_Y(1 - u) at continuity
    points of the (continuous, strictly increasing) loss CDFs used here.
    Subclasses implement ``tail_quantile(u)`` = q_Y(1 - u) directly off
    the tail probability, which stays exact where 1 - u would round to 1.
    """

    def tail_quantile(self, u):
        raise NotImplementedError

    def loss_quantile(self, p):
        """Ordinary loss quantile at probability p."""
        return self.tail_quantile(1.0 - np.asarray(p, dtype=float))

    def loss_mean(self) -> float:
        raise NotImplementedError

    def upper_quantile(self, u):
        _check_unit_open(u)
        out = -np.asarray(self.tail_quantile(np.asarray(u, dtype=float)), dtype=float)
        return float(out) if np.isscalar(u) else out

    def mean(self) -> float:
        return -self.loss_mean()


class GammaLoss(_LossRisk):
    """Gamma-distributed loss with shape k and scale s (mean ks, variance ks^2)."""

    def __init__(self, shape: float, scale: float):
        if shape <= 0 or scale <= 0:
            raise DomainError("gamma shape and scale must be positive")
        self.shape = float(shape)
        self.scale = float(scale)

    def tail_quantile(self, u):
        return self.scale * special.gammainccinv(self.shape, u)

    def loss_mean(self) -> float:
        return self.shape * self.scale

    def __repr__(self) -> str:
        return f"GammaLoss(shape={self.shape!r}, scale={self.scale!r})"


class LognormalLoss(_LossRisk):
    """Lognormal loss with log-mean mu and log-standard-deviation sigma."""

    def __init__(self, mu: float, sigma: float):
        if sigma <= 0:
            raise DomainError("sigma must be positive")
        self.mu = float(mu)
        self.sigma = float(sigma)

    def tail_quantile(self, u):
        return np.exp(self.mu - self.sigma * special.ndtri(u))

    def loss_mean(self) -> float:
        return math.exp(self.mu + 0.5 * self.sigma**2)

    def __repr__(self) -> str:
        return f"LognormalLoss(mu={self.mu!r}, sigma={self.sigma!r})"


class ParetoLoss(_LossRisk):
    """Pareto loss with tail index gamma > 1: P(Y > x) = (x/scale)^(-gamma)."""

    def __init__(self, gamma: float, scale: float = 1.0):
        if gamma <= 0 or scale <= 0:
            raise DomainError("gamma and scale must be positive")
        if gamma <= 1:
            raise InfiniteMeanError("Pareto with gamma <= 1 has no mean")
        self.gamma = float(gamma)
        self.scale = float(scale)

    def tail_quantile(self, u):
        return self.scale * np.asarray(u, dtype=float) ** (-1.0 / self.gamma)

    def loss_mean(self) -> float:
        return self.scale * self.gamma / (self.gamma - 1.0)

    def __repr__(self) -> str:
        return f"ParetoLoss(gamma={self.gamma!r}, scale={self.scale!r})"


class GpdLoss(_LossRisk):
    """Generalized Pareto loss with shape xi < 1, location nu and scale beta."""

    def __init__(self, xi: float, nu: float, beta: float):
        if beta <= 0:
            raise DomainError("beta must be positive")
        if xi >= 1:
            raise InfiniteMeanError("GPD with xi >= 1 has no mean")
        self.xi = float(xi)
        self.nu = float(nu)
        self.beta = float(beta)

    def tail_quantile(self, u):
        u = np.asarray(u, dtype=float)
        if self.xi == 0.0:
            return self.nu - self.beta * np.log(u)
        return self.nu + self.beta * (u ** (-self.xi) - 1.0) / self.xi

    def loss_mean(self) -> float:
        return self.nu + self.beta / (1.0 - self.xi)

    def __repr__(self) -> str:
        return f"GpdLoss(xi={self.xi!r}, nu={self.nu!r}, beta={self.beta!r})"


_THEOREM_GRID = 512


def _check_es_curve_shape(f, fprime, name: str = "es curve") -> None:
    """Numerically verify the two conditions a level->ES function must satisfy.

    The scaled curve t*f(t) has to vanish at 0+, and the derived map
    t -> -f(t) - t*f'(t) (the candidate quantile) has to be increasing.
    Checked on a fixed grid; isolated violations below float noise pass.
    """
    t = np.linspace(1e-6, 1.0, _THEOREM_GRID)
    q = -np.asarray(f(t), dtype=float) - t * np.asarray(fprime(t), dtype=float)
    if not np.all(np.isfinite(q)):
        raise DomainError(f"{name}: quantile -f(t)-t*f'(t) is not finite on (0,1]")
    scale = 1.0 + float(np.max(np.abs(q)))
    drops = np.diff(q)
    if np.any(drops < -1e-9 * scale):
        j = int(np.argmin(drops))
        raise DomainError(
            f"{name}: -f(t)-t*f'(t) decreases near t={t[j]:.6g}; not a valid ES curve"
        )
    tiny = np.array([1e-10, 1e-8, 1e-6])
    head = tiny * np.asarray(f(tiny), dtype=float)
    if np.any(np.abs(head) > 1e-4 * (1.0 + abs(float(f(1.0))))):
        raise DomainError(f"{name}: t*f(t) does not vanish as t -> 0+")


class EsCurveRisk:
    """Risk defined by a closed-form ES curve f and its derivative f'.

    The upper quantile is q(t) = -f(t) - t*f'(t); construction validates
    that q is increasing and that t*f(t) vanishes at 0+, which are exactly
    the conditions under which some integrable payoff has ES curve f.
    """

    def __init__(self, f, fprime, validate: bool = True):
        self.f = f
        self.fprime = fprime
        if validate:
            _check_es_curve_shape(f, fprime)

    def upper_quantile(self, u):
        _check_unit_open(u)
        uarr = np.asarray(u, dtype=float)
        out = -np.asarray(self.f(uarr), dtype=float) - uarr * np.asarray(self.fprime(uarr), dtype=float)
        return float(out) if np.isscalar(u) else out

    def es_level(self, level):
        """ES at a level, read directly off the defining curve."""
        arr = np.asarray(level, dtype=float)
        if np.any(arr <= 0.0) or np.any(arr > 1.0):
            raise DomainError("ES level must lie in (0, 1]")
        out = np.asarray(self.f(arr), dtype=float)
        return float(out) if np.isscalar(level) else out

    def mean(self) -> float:
        return -float(self.f(1.0))


class TabulatedEsCurveRisk:
    """Risk defined by a tabulated ES curve.

    The scaled curve F(t) = t*f(t) is interpolated piecewise linearly
    through (0, 0) and the table knots, which makes the upper quantile a
    right-continuous step function (the negated chord slopes of F).
    """

    def __init__(self, levels, values):
        t = np.asarray(levels, dtype=float)
        v = np.asarray(values, dtype=float)
        if t.ndim != 1 or t.size < 2 or t.shape != v.shape:
            raise DomainError("need two aligned 1-d arrays of levels and values")
        if np.any(np.diff(t) <= 0) or t[0] <= 0.0 or t[-1] > 1.0:
            raise DomainError("levels must be strictly increasing within (0, 1]")
        self.levels = t
        self.values = v
        knots = np.concatenate(([0.0], t))
        big_f = np.concatenate(([0.0], t * v))
        slopes = np.diff(big_f) / np.diff(knots)
        if np.any(np.diff(-slopes) < -1e-9 * (1.0 + np.max(np.abs(slopes)))):
            raise DomainError("table is not a valid ES curve: implied quantile decreases")
        self._knots = knots
        self._big_f = big_f
        self._q_steps = -slopes

    def upper_quantile(self, u):
        _check_unit_open(u)
        uarr = np.asarray(u, dtype=float)
        if np.any(uarr > self.levels[-1]):
            raise DomainError("u beyond the last tabulated level")
        idx = np.searchsorted(self._knots, uarr, side="right")
        out = self._q_steps[np.minimum(idx - 1, self._q_steps.size - 1)]
        return float(out) if np.isscalar(u) else out

    def es_level(self, level):
        arr = np.asarray(level, dtype=float)
        if np.any(arr <= 0.0) or np.any(arr > self.levels[-1]):
            raise DomainError("ES level outside the tabulated range")
        big = np.interp(arr, self._knots, self._big_f)
        out = big / arr
        return float(out) if np.isscalar(level) else out

    def mean(self) -> float:
        if self.levels[-1] != 1.0:
            raise DomainError("table does not reach level 1; mean is undetermined")
        return -float(self.values[-1])


_PARAMETRIC_FAMILIES = {
    "constant": Constant,
    "normal": Normal,
    "student_t": StudentT,
    "gamma_loss": GammaLoss,
    "lognormal_loss": LognormalLoss,
    "pareto_loss": ParetoLoss,
    "gpd_loss": GpdLoss,
}


def parametric(family: str, **params):
    """Build a parametric risk from a family name and keyword parameters."""
    try:
        cls = _PARAMETRIC_FAMILIES[family]
    except KeyError:
        raise DomainError(f"unknown family {family!r}") from None
    return cls(**params)


def load_samples_csv(path) -> dict[str, np.ndarray]:
    """Read a CSV of empirical samples: one numeric column per risk, header row first."""
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise DomainError(f"{path}: empty CSV") from None
        rows = [[float(cell) for cell in row] for row in reader if row]
    if not rows:
        raise DomainError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=float)
    if data.shape[1] != len(header):
        raise DomainError(f"{path}: ragged rows")
    return {name.strip(): data[:, j] for j, name in enumerate(header)}


def empirical_from_csv(path, column: str) -> EmpiricalRisk:
    """Load one named column of a samples CSV as an empirical risk."""
    columns = load_samples_csv(path)
    if column not in columns:
        raise DomainError(f"{path}: no column named {column!r}")
    return EmpiricalRisk(columns[column])

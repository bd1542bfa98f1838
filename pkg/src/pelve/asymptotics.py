"""Closed-form reductions for elliptical payoffs and heavy-tail limits.

For elliptical payoff vectors every marginal is a location-scale copy of
one standard generator Z, so the average, worst-case and identity-
aggregated systemic calibrations all collapse to the PELVE of Z, the
least-squares calibration collapses whenever E[-Z] <= VaR(Z), and the
positive-part systemic calibration can only fall below it.  For payoffs
whose losses have a regularly varying tail with index gamma > 1, every
method converges to (gamma/(gamma-1))^gamma as the VaR level shrinks;
that constant exceeds Euler's number and decreases towards it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core import DEFAULT_TOL, pelve
from .measures import var
from .multi import a_pelve, equal_weights, mse_pelve, sys_pelve, wc_pelve
from .risks import Constant, DomainError, EmpiricalRisk, Normal, ParetoLoss, StudentT


@dataclass(frozen=True)
class EllipticalSpec:
    """Location vector, scatter matrix and generator of an elliptical payoff."""

    mu: np.ndarray
    sigma: np.ndarray
    generator: str = "normal"  # "normal" | "student_t"
    dof: float | None = None

    def __post_init__(self):
        mu = np.atleast_1d(np.asarray(self.mu, dtype=float))
        sig = np.atleast_2d(np.asarray(self.sigma, dtype=float))
        n = mu.size
        if sig.shape != (n, n):
            raise DomainError(f"scatter matrix must be {n}x{n}")
        if np.max(np.abs(sig - sig.T)) > 1e-12:
            raise DomainError("scatter matrix must be symmetric within 1e-12")
        if np.min(np.linalg.eigvalsh(sig)) < -1e-10:
            raise DomainError("scatter matrix must be positive semi-definite")
        if self.generator not in ("normal", "student_t"):
            raise DomainError("generator must be 'normal' or 'student_t'")
        if self.generator == "student_t" and (self.dof is None or self.dof <= 1):
            raise DomainError("student_t generator needs dof > 1")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sig)

    @property
    def dim(self) -> int:
        return self.mu.size


def standard_generator_risk(spec: EllipticalSpec):
    """The one-dimensional standard generator Z of the spec."""
    if spec.generator == "normal":
        return Normal(0.0, 1.0)
    return StudentT(spec.dof, 0.0, 1.0)


def marginal_risk(spec: EllipticalSpec, i: int):
    """Marginal payoff i (0-based): the generator scaled by sqrt(sigma_ii), shifted by mu_i."""
    if not 0 <= i < spec.dim:
        raise DomainError(f"marginal index {i} out of range for dimension {spec.dim}")
    scale = float(spec.sigma[i, i])
    loc = float(spec.mu[i])
    if scale <= 0.0:
        return Constant(loc)
    if spec.generator == "normal":
        return Normal(loc, math.sqrt(scale))
    return StudentT(spec.dof, loc, math.sqrt(scale))


@dataclass(frozen=True)
class CheckAssertion:
    """One numeric assertion of a report: lhs against rhs within a tolerance."""

    name: str
    lhs: float
    rhs: float
    tolerance: float
    passed: bool


@dataclass
class CheckReport:
    """A named bundle of assertions, serializable to JSON."""

    name: str
    assertions: list[CheckAssertion] = field(default_factory=list)

    def check_close(self, name: str, lhs: float, rhs: float, tol: float) -> None:
        ok = bool(abs(lhs - rhs) <= tol) or (math.isinf(lhs) and math.isinf(rhs))
        self.assertions.append(CheckAssertion(name, float(lhs), float(rhs), float(tol), ok))

    def check_below(self, name: str, lhs: float, rhs: float, slack: float = 0.0) -> None:
        self.assertions.append(
            CheckAssertion(name, float(lhs), float(rhs), float(slack), bool(lhs <= rhs + slack))
        )

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def to_json(self) -> str:
        payload = {
            "name": self.name,
            "passed": self.passed,
            "assertions": [
                {
                    "name": a.name,
                    "lhs": a.lhs,
                    "rhs": a.rhs,
                    "tolerance": a.tolerance,
                    "pass": a.passed,
                }
                for a in self.assertions
            ],
        }
        return json.dumps(payload, indent=2)


def elliptical_reduction_check(
    spec: EllipticalSpec,
    lam: float,
    weights=None,
    tol: float = 1e-6,
    grid_size: int = 2048,
) -> CheckReport:
    """Verify the elliptical collapse of all four methods against pelve(Z).

    Runs the average, worst-case, identity-systemic and least-squares
    calibrations on the marginals and compares each to the generator's
    PELVE; also evaluates the positive-part systemic criterion (some
    marginal with positive variance and mu_i/sigma_i <= VaR(Z)) and
    checks equality exactly when it holds, strict shortfall otherwise.
    """
    report = CheckReport(name="elliptical_reduction")
    n = spec.dim
    w = equal_weights(n) if weights is None else np.asarray(weights, dtype=float)
    marginals = [marginal_risk(spec, i) for i in range(n)]
    z = standard_generator_risk(spec)
    solver_tol = min(DEFAULT_TOL, tol / 10.0)
    c_z = pelve(z, lam, solver_tol)

    report.check_close("a_pelve equals pelve(Z)", a_pelve(marginals, lam, w, solver_tol), c_z, tol)
    report.check_close("wc_pelve equals pelve(Z)", wc_pelve(marginals, lam, solver_tol), c_z, tol)
    report.check_close(
        "sys_pelve(identity) equals pelve(Z)",
        sys_pelve(marginals, lam, g="identity", tol=solver_tol),
        c_z,
        tol,
    )
    mse = mse_pelve(marginals, lam, w, grid_size=grid_size, plateau_tol=1e-13)
    if -z.mean() <= var(z, lam):
        report.check_close("mse_pelve equals pelve(Z)", mse.leftmost, c_z, tol)
    else:
        report.check_close("mse_pelve equals 1/lam", mse.leftmost, 1.0 / lam, tol)

    sys_pp = sys_pelve(marginals, lam, g="positive_part", tol=solver_tol)
    report.check_below("sys_pelve(positive_part) at most pelve(Z)", sys_pp, c_z, tol)
    var_z = var(z, lam)
    criterion = any(
        spec.sigma[i, i] > 0.0 and spec.mu[i] / math.sqrt(spec.sigma[i, i]) <= var_z for i in range(n)
    )
    if criterion:
        report.check_close("sys_pelve(positive_part) equals pelve(Z)", sys_pp, c_z, tol)
    else:
        report.check_below("sys_pelve(positive_part) strictly below pelve(Z)", sys_pp, c_z - tol)
    return report


def mvr_limit(gamma: float) -> float:
    """Common small-level limit of every method under a gamma-regularly-varying tail."""
    if gamma <= 1.0:
        raise DomainError("tail index must exceed 1")
    return (gamma / (gamma - 1.0)) ** gamma


def _pareto_samples(gamma: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Payoff samples whose losses are standard Pareto with tail index gamma."""
    u = rng.random(size)
    return -((1.0 - u) ** (-1.0 / gamma))


def mvr_convergence_check(
    gamma: float,
    lam_grid,
    sample_size: int | None,
    seed: int = 0,
    n_risks: int = 2,
    rtol: float = 0.1,
    tol: float = DEFAULT_TOL,
) -> CheckReport:
    """Check that every method approaches the heavy-tail limit on Pareto losses.

    With sample_size None the marginals are analytic Pareto-loss risks, for
    which every method hits the limit to solver precision at any usable
    level; with samples the empirical values must lie within rtol of the
    limit at every grid level.  (The Pareto instance has a level-free
    population value, so finite-sample gaps across the grid are noise
    rather than a shrinking sequence; the assertion is therefore a uniform
    band, with the per-level gaps retained in the report.)
    """
    limit = mvr_limit(gamma)
    report = CheckReport(name="mvr_convergence")
    grid = np.asarray(lam_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) >= 0):
        raise DomainError("lam_grid must be strictly decreasing towards 0")
    if sample_size is None:
        risks = [ParetoLoss(gamma) for _ in range(n_risks)]
        band = max(100.0 * tol, 1e-7 * limit)
    else:
        rng = np.random.default_rng(seed)
        risks = [EmpiricalRisk(_pareto_samples(gamma, sample_size, rng)) for _ in range(n_risks)]
        band = rtol * limit
    w = equal_weights(n_risks)
    for lam in grid:
        lam = float(lam)
        report.check_close(f"a_pelve at lam={lam:g}", a_pelve(risks, lam, w, tol), limit, band)
        report.check_close(f"wc_pelve at lam={lam:g}", wc_pelve(risks, lam, tol), limit, band)
        report.check_close(
            f"sys_pelve(identity) at lam={lam:g}", sys_pelve(risks, lam, g="identity", tol=tol), limit, band
        )
        report.check_close(
            f"sys_pelve(positive_part) at lam={lam:g}",
            sys_pelve(risks, lam, g="positive_part", tol=tol),
            limit,
            band,
        )
        report.check_close(
            f"mse_pelve at lam={lam:g}", mse_pelve(risks, lam, w).leftmost, limit, band
        )
    return report

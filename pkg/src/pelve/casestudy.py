"""Balance-sheet Monte-Carlo over six insurers and the reserve-change report.

Each insurer's future equity is assets minus liabilities: non-liquid
assets stay constant, liquid assets follow a two-stock Black-Scholes
wealth process with a constant portfolio (one stock is common to all
insurers, one idiosyncratic), and liabilities are drawn from a gamma,
lognormal, generalized-Pareto or constant model.  The report computes
per-insurer PELVE curves, all multi-agent calibration curves, and the
total / absolute / relative reserve changes a switch from VaR to the
calibrated ES would cause.

Randomness is counter-based: every path derives its draws from
(seed, path index), so results are bitwise independent of chunking and
worker count.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import special

from .core import DEFAULT_TOL, pelve_curve
from .measures import es, var
from .multi import (
    DEFAULT_GRID_SIZE,
    METHOD_COLUMNS,
    check_weights,
    multi_pelve_curves,
    write_multi_curves,
)
from .risks import DomainError, EmpiricalRisk

STOCK_FRACTION = 0.85  # balance-sheet stocks split 85/15 between the two stocks


@dataclass(frozen=True)
class MarketSpec:
    """Two-stock Black-Scholes market shared by all insurers."""

    rate: float = 0.01
    drift: tuple[float, float] = (0.04, 0.06)
    vols: tuple[float, float] = (0.2, 0.4)
    horizon: float = 1.0

    def __post_init__(self):
        if self.vols[0] <= 0 or self.vols[1] <= 0:
            raise DomainError("volatilities must be positive")
        if self.horizon <= 0:
            raise DomainError("horizon must be positive")


@dataclass(frozen=True)
class LiabilityModel:
    """Named liability distribution: gamma(k,s), lognormal(mu,sigma), gpd(xi,nu,beta) or constant(value)."""

    family: str
    params: dict

    def __post_init__(self):
        fam, p = self.family, self.params
        if fam == "gamma":
            if p["k"] <= 0 or p["s"] <= 0:
                raise DomainError("gamma liability needs k > 0 and s > 0")
        elif fam == "lognormal":
            if p["sigma"] <= 0:
                raise DomainError("lognormal liability needs sigma > 0")
        elif fam == "gpd":
            if p["beta"] <= 0:
                raise DomainError("gpd liability needs beta > 0")
            if p["xi"] >= 1:
                raise DomainError("gpd liability needs xi < 1 for a finite mean")
        elif fam == "constant":
            if "value" not in p:
                raise DomainError("constant liability needs a value")
        else:
            raise DomainError(f"unknown liability family {fam!r}")

    def draw(self, u: np.ndarray) -> np.ndarray:
        """Inverse-CDF transform of uniforms into liability amounts."""
        p = self.params
        if self.family == "gamma":
            return p["s"] * special.gammaincinv(p["k"], u)
        if self.family == "lognormal":
            return np.exp(p["mu"] + p["sigma"] * special.ndtri(u))
        if self.family == "gpd":
            xi, nu, beta = p["xi"], p["nu"], p["beta"]
            if xi == 0.0:
                return nu - beta * np.log1p(-u)
            return nu + beta * ((1.0 - u) ** (-xi) - 1.0) / xi
        return np.full_like(u, float(p["value"]))

    def mean(self) -> float:
        p = self.params
        if self.family == "gamma":
            return p["k"] * p["s"]
        if self.family == "lognormal":
            return math.exp(p["mu"] + 0.5 * p["sigma"] ** 2)
        if self.family == "gpd":
            return p["nu"] + p["beta"] / (1.0 - p["xi"])
        return float(p["value"])


@dataclass(frozen=True)
class InsurerSpec:
    """Balance-sheet figures and the liability model of one insurer."""

    name: str
    equity_capital: float
    assets: float
    liabilities: float
    stocks: float
    liquid: float
    liability: LiabilityModel

    def __post_init__(self):
        if self.liquid <= 0:
            raise DomainError(f"{self.name}: liquid assets must be positive")
        if abs(self.assets - self.equity_capital - self.liabilities) > 1.0:
            raise DomainError(f"{self.name}: assets must equal equity capital plus liabilities")

    @property
    def portfolio(self) -> tuple[float, float]:
        return portfolio_from_balance_sheet(self.stocks, self.liquid)


@dataclass(frozen=True)
class SimulationConfig:
    """Insurers, market, path count and seed of one simulation run."""

    insurers: tuple[InsurerSpec, ...]
    market: MarketSpec
    paths: int
    seed: int

    def __post_init__(self):
        if len(self.insurers) < 1:
            raise DomainError("need at least one insurer")
        if self.paths < 1:
            raise DomainError("need at least one path")
        object.__setattr__(self, "insurers", tuple(self.insurers))


@dataclass(frozen=True)
class MultiSpec:
    """Weight choices and the systemic aggregation used by the report."""

    a_weights: np.ndarray
    mse_weights: np.ndarray
    aggregation: str = "positive_part"


def portfolio_from_balance_sheet(stocks: float, liquid: float) -> tuple[float, float]:
    """Constant portfolio fractions (0.85*S/x0, 0.15*S/x0)."""
    if liquid <= 0:
        raise DomainError("liquid assets must be positive")
    ratio = stocks / liquid
    return (STOCK_FRACTION * ratio, (1.0 - STOCK_FRACTION) * ratio)


def moments_to_params(family: str, mean: float, variance: float, location: float | None = None) -> dict:
    """Method-of-moments liability parameters from a target mean and variance."""
    if mean <= 0 or variance <= 0:
        raise DomainError("mean and variance must be positive")
    if family == "gamma":
        return {"k": mean**2 / variance, "s": variance / mean}
    if family == "lognormal":
        sigma_sq = math.log1p(variance / mean**2)
        return {"mu": math.log(mean) - 0.5 * sigma_sq, "sigma": math.sqrt(sigma_sq)}
    if family == "gpd":
        if location is None:
            raise DomainError("gpd moments need the location nu")
        excess = mean - location
        if excess <= 0:
            raise DomainError("no gpd solution with xi < 1/2: mean must exceed the location")
        xi = 0.5 * (1.0 - excess**2 / variance)
        beta = excess * (1.0 - xi)
        return {"xi": xi, "nu": location, "beta": beta}
    raise DomainError(f"unknown family {family!r}")


def asset_share_weights(insurers) -> np.ndarray:
    """Weights proportional to each insurer's share of total assets."""
    assets = np.array([ins.assets for ins in insurers], dtype=float)
    return assets / assets.sum()


def inverse_asset_weights(insurers) -> np.ndarray:
    """Weights inversely proportional to the asset shares, renormalized."""
    inv = 1.0 / asset_share_weights(insurers)
    return inv / inv.sum()


# ---------------------------------------------------------------------------
# simulation
# ---------------------------------------------------------------------------


def _path_uniforms(seed: int, start: int, count: int, width: int) -> np.ndarray:
    """Uniform draws for paths [start, start+count), shape (count, width).

    The Philox stream is keyed by the seed; each path owns a whole number
    of 4-draw counter blocks (the unit Philox.advance skips), so any
    chunking of the path range yields bitwise identical numbers.
    """
    blocks_per_path = -(-width // 4)
    bit_gen = np.random.Philox(key=seed)
    bit_gen.advance(start * blocks_per_path)
    u = np.random.Generator(bit_gen).random((count, 4 * blocks_per_path))
    return u[:, :width]


def _wealth_factor(pi: tuple[float, float], market: MarketSpec, z_common, z_idio) -> np.ndarray:
    """Terminal wealth of one unit of liquid assets given standard normal shocks."""
    s_common = market.vols[0] * pi[0]
    s_idio = market.vols[1] * pi[1]
    excess = pi[0] * (market.drift[0] - market.rate) + pi[1] * (market.drift[1] - market.rate)
    drift = (excess + market.rate - 0.5 * (s_common**2 + s_idio**2)) * market.horizon
    vol_t = math.sqrt(market.horizon)
    return np.exp(drift + vol_t * (s_common * z_common + s_idio * z_idio))


def terminal_wealth(x0: float, pi, market: MarketSpec, paths: int, seed: int) -> np.ndarray:
    """Sampled terminal liquid wealth of a single insurer."""
    if paths < 1:
        raise DomainError("need at least one path")
    u = _path_uniforms(seed, 0, paths, 3)
    z_common = special.ndtri(_clip_unit(u[:, 0]))
    z_idio = special.ndtri(_clip_unit(u[:, 1]))
    return x0 * _wealth_factor(tuple(pi), market, z_common, z_idio)


def _clip_unit(u: np.ndarray) -> np.ndarray:
    # Generator.random can return exactly 0.0, which inverse CDFs reject
    return np.clip(u, 1e-300, 1.0 - 1e-16)


def _equity_block(config: SimulationConfig, start: int, count: int) -> np.ndarray:
    n = len(config.insurers)
    width = 1 + 2 * n
    u = _path_uniforms(config.seed, start, count, width)
    z_common = special.ndtri(_clip_unit(u[:, 0]))
    out = np.empty((count, n))
    for i, ins in enumerate(config.insurers):
        z_idio = special.ndtri(_clip_unit(u[:, 1 + i]))
        wealth = ins.liquid * _wealth_factor(ins.portfolio, config.market, z_common, z_idio)
        liab = ins.liability.draw(_clip_unit(u[:, 1 + n + i]))
        out[:, i] = (ins.assets - ins.liquid) + wealth - liab
    return out


def simulate_equity(config: SimulationConfig, workers: int = 1) -> np.ndarray:
    """Equity samples, shape (paths, n insurers); bitwise reproducible.

    Identical for any worker count because each path's draws depend only
    on (seed, path index).
    """
    if workers < 1:
        raise DomainError("need at least one worker")
    paths = config.paths
    if workers == 1:
        return _equity_block(config, 0, paths)
    chunk = -(-paths // workers)
    spans = [(start, min(chunk, paths - start)) for start in range(0, paths, chunk)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        blocks = list(pool.map(lambda span: _equity_block(config, span[0], span[1]), spans))
    return np.vstack(blocks)


# ---------------------------------------------------------------------------
# reporting
# ---------------------------------------------------------------------------

DEFAULT_LEVEL_GRID = np.exp(np.linspace(math.log(0.005), math.log(0.1), 50))


@dataclass(frozen=True)
class ReserveReport:
    """Per-insurer PELVE curves, method curves and reserve-change statistics."""

    levels: np.ndarray
    insurer_names: tuple[str, ...]
    pelve_curves: np.ndarray  # (levels, insurers)
    multi_curves: dict[str, np.ndarray]
    total_change: dict[str, np.ndarray]
    abs_change: dict[str, np.ndarray]
    relative_change: dict[str, np.ndarray]  # method -> (levels, insurers)


def reserve_report(
    equity: np.ndarray,
    levels,
    spec: MultiSpec,
    insurer_names=None,
    tol: float = DEFAULT_TOL,
    grid_size: int = DEFAULT_GRID_SIZE,
) -> ReserveReport:
    """Reserve-change report over the empirical equity distributions.

    For each method V and level lam the total change is
    sum_i (ES at the calibrated level - VaR at lam), the absolute change
    replaces each term by its magnitude, and the relative change divides
    each insurer's term by its VaR.  Warns when lam * paths < 50 for the
    smallest level, where tail estimates are unreliable.
    """
    matrix = np.asarray(equity, dtype=float)
    if matrix.ndim != 2 or matrix.size == 0:
        raise DomainError("equity matrix must be nonempty, shape (paths, insurers)")
    grid = np.asarray(levels, dtype=float)
    paths, n = matrix.shape
    if insurer_names is None:
        insurer_names = tuple(f"insurer_{i + 1}" for i in range(n))
    if float(grid.min()) * paths < 50:
        warnings.warn(
            f"only {float(grid.min()) * paths:.0f} expected tail samples at the smallest level; "
            "tail estimates are unreliable",
            stacklevel=2,
        )
    risks = [EmpiricalRisk(matrix[:, i]) for i in range(n)]
    a_w = check_weights(spec.a_weights, n)
    mse_w = check_weights(spec.mse_weights, n)

    curves = np.column_stack([pelve_curve(risk, grid, tol).values for risk in risks])
    multi = multi_pelve_curves(
        risks, grid, a_w, mse_w, g=spec.aggregation, tol=tol, grid_size=grid_size
    )

    vars_ = np.column_stack([[var(risk, float(lam)) for lam in grid] for risk in risks])
    total, absolute, relative = {}, {}, {}
    for name in METHOD_COLUMNS:
        changes = np.full((grid.size, n), np.nan)
        for j, lam in enumerate(grid):
            multiplier = float(multi[name][j])
            if math.isinf(multiplier):
                continue
            new_level = min(1.0, multiplier * float(lam))
            for i, risk in enumerate(risks):
                changes[j, i] = es(risk, new_level) - vars_[j, i]
        total[name] = changes.sum(axis=1)
        absolute[name] = np.abs(changes).sum(axis=1)
        relative[name] = changes / vars_
    return ReserveReport(
        levels=grid,
        insurer_names=tuple(insurer_names),
        pelve_curves=curves,
        multi_curves=multi,
        total_change=total,
        abs_change=absolute,
        relative_change=relative,
    )


# ---------------------------------------------------------------------------
# config and artifact I/O
# ---------------------------------------------------------------------------


def config_to_dict(config: SimulationConfig) -> dict:
    return {
        "market": {
            "r": config.market.rate,
            "b": list(config.market.drift),
            "vols": list(config.market.vols),
            "horizon": config.market.horizon,
        },
        "insurers": [
            {
                "name": ins.name,
                "ec": ins.equity_capital,
                "assets": ins.assets,
                "liabilities": ins.liabilities,
                "stocks": ins.stocks,
                "liquid": ins.liquid,
                "liability": {"family": ins.liability.family, **ins.liability.params},
            }
            for ins in config.insurers
        ],
        "paths": config.paths,
        "seed": config.seed,
    }


def config_from_dict(payload: dict) -> SimulationConfig:
    market = payload["market"]
    insurers = []
    for entry in payload["insurers"]:
        liability = dict(entry["liability"])
        family = liability.pop("family")
        insurers.append(
            InsurerSpec(
                name=entry["name"],
                equity_capital=float(entry["ec"]),
                assets=float(entry["assets"]),
                liabilities=float(entry["liabilities"]),
                stocks=float(entry["stocks"]),
                liquid=float(entry["liquid"]),
                liability=LiabilityModel(family=family, params=liability),
            )
        )
    return SimulationConfig(
        insurers=tuple(insurers),
        market=MarketSpec(
            rate=float(market["r"]),
            drift=tuple(market["b"]),
            vols=tuple(market["vols"]),
            horizon=float(market["horizon"]),
        ),
        paths=int(payload["paths"]),
        seed=int(payload["seed"]),
    )


def write_config(path, config: SimulationConfig) -> None:
    with open(path, "w") as handle:
        json.dump(config_to_dict(config), handle, indent=2)
        handle.write("\n")


def load_config(path) -> SimulationConfig:
    with open(path) as handle:
        return config_from_dict(json.load(handle))


def write_samples_csv(path, equity: np.ndarray, names) -> None:
    """One equity column per insurer, 17 significant digits."""
    matrix = np.asarray(equity, dtype=float)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(list(names))
        for row in matrix:
            writer.writerow([f"{x:.17g}" for x in row])


def write_report(outdir, report: ReserveReport) -> list[Path]:
    """Write the report CSVs into a directory; returns the paths written."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []

    path = outdir / "pelve_curves.csv"
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["level", *report.insurer_names])
        for j, lam in enumerate(report.levels):
            row = [f"{lam:.17g}"]
            row += [
                "inf" if math.isinf(v) else f"{v:.17g}" for v in report.pelve_curves[j]
            ]
            writer.writerow(row)
    written.append(path)

    path = outdir / "multi_curves.csv"
    write_multi_curves(path, report.levels, report.multi_curves)
    written.append(path)

    for stem, table in (("total_change", report.total_change), ("abs_change", report.abs_change)):
        path = outdir / f"{stem}.csv"
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["level", *METHOD_COLUMNS])
            for j, lam in enumerate(report.levels):
                writer.writerow(
                    [f"{lam:.17g}"] + [f"{table[name][j]:.17g}" for name in METHOD_COLUMNS]
                )
        written.append(path)

    for name in METHOD_COLUMNS:
        path = outdir / f"relative_change_{name}.csv"
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["level", *report.insurer_names])
            for j, lam in enumerate(report.levels):
                writer.writerow(
                    [f"{lam:.17g}"] + [f"{x:.17g}" for x in report.relative_change[name][j]]
                )
        written.append(path)
    return written


# ---------------------------------------------------------------------------
# the six-insurer benchmark
# ---------------------------------------------------------------------------

# balance sheets: name, equity capital, assets, liabilities, stocks, liquid assets
_BALANCE_SHEETS = (
    ("insurer_1", 2567.0, 290685.0, 288118.0, 136096.0, 191434.0),
    ("insurer_2", 919.0, 57851.0, 56932.0, 10646.0, 51572.0),
    ("insurer_3", 743.0, 41133.0, 40390.0, 11870.0, 36068.0),
    ("insurer_4", 1207.0, 83914.0, 82707.0, 25033.0, 62545.0),
    ("insurer_5", 383.0, 26179.0, 25796.0, 9747.0, 17655.0),
    ("insurer_6", 516.0, 18603.0, 18087.0, 12935.0, 15695.0),
)

# gamma liability parameters (k, s) for every insurer
_GAMMA_PARAMS = (
    (282.93, 1018.34),
    (729.01, 78.09),
    (6996.42, 5.77),
    (64.04, 1291.55),
    (1083.58, 23.81),
    (2830.38, 6.39),
)

# heavy-tail replacements: lognormal for insurers 2 and 4, GPD for 1 and 6
_HEAVY_TAIL_PARAMS = {
    0: ("gpd", {"xi": 0.4185, "nu": 281203.0, "beta": 4021.0}),
    1: ("lognormal", {"mu": 10.94, "sigma": 0.1473}),
    3: ("lognormal", {"mu": 11.21, "sigma": 0.4722}),
    5: ("gpd", {"xi": 0.0363, "nu": 9238.0, "beta": 213.0}),
}


def benchmark_insurers(model: int = 1) -> tuple[InsurerSpec, ...]:
    """The six benchmark insurers; model 1 is all-gamma, model 2 swaps in heavy tails."""
    if model not in (1, 2):
        raise DomainError("model must be 1 or 2")
    out = []
    for i, (name, ec, assets, liabilities, stocks, liquid) in enumerate(_BALANCE_SHEETS):
        if model == 2 and i in _HEAVY_TAIL_PARAMS:
            family, params = _HEAVY_TAIL_PARAMS[i]
            liability = LiabilityModel(family=family, params=dict(params))
        else:
            k, s = _GAMMA_PARAMS[i]
            liability = LiabilityModel(family="gamma", params={"k": k, "s": s})
        out.append(
            InsurerSpec(
                name=name,
                equity_capital=ec,
                assets=assets,
                liabilities=liabilities,
                stocks=stocks,
                liquid=liquid,
                liability=liability,
            )
        )
    return tuple(out)


def benchmark_config(model: int = 1, paths: int = 1_000_000, seed: int = 20250801) -> SimulationConfig:
    """Ready-to-run simulation config for the six-insurer benchmark."""
    return SimulationConfig(insurers=benchmark_insurers(model), market=MarketSpec(), paths=paths, seed=seed)


def benchmark_multi_spec(insurers) -> MultiSpec:
    """Weighted-method weights used in the benchmark report."""
    return MultiSpec(
        a_weights=asset_share_weights(insurers),
        mse_weights=inverse_asset_weights(insurers),
        aggregation="positive_part",
    )

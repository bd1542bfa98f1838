"""Command-line front end.

Verbs: ``pelve`` (one PELVE value for a parametric distribution),
``curve`` (ES curve of an empirical CSV column), ``multi`` (one
multi-agent value over a simulated config), ``validate-curve``,
``simulate`` (equity samples CSV) and ``report`` (reserve-change CSV
bundle).  Numeric stdout uses 17 significant digits; exit codes are
0 success, 2 validation failure, 1 runtime error and 64 usage error.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import casestudy, escurve, measures, multi
from .core import pelve
from .risks import (
    Constant,
    DomainError,
    EmpiricalRisk,
    GammaLoss,
    GpdLoss,
    InfiniteMeanError,
    LognormalLoss,
    Normal,
    ParetoLoss,
    StudentT,
    load_samples_csv,
)

USAGE_EXIT = 64


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage problems with exit code 64."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _fmt(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.17g}"


def _parse_level_range(text: str) -> np.ndarray:
    """a:b:N means N log-spaced levels in [a, b]."""
    try:
        a_str, b_str, n_str = text.split(":")
        a, b, n = float(a_str), float(b_str), int(n_str)
    except ValueError:
        raise DomainError(f"bad level range {text!r}; expected a:b:N") from None
    if not 0.0 < a <= b <= 1.0 or n < 1:
        raise DomainError("level range needs 0 < a <= b <= 1 and N >= 1")
    if n == 1:
        return np.array([a])
    return np.exp(np.linspace(math.log(a), math.log(b), n))


def _risk_from_args(args) -> object:
    dist = args.dist
    if dist == "constant":
        return Constant(_require(args, "value"))
    if dist == "normal":
        return Normal(_require(args, "mu"), _require(args, "sigma"))
    if dist == "student-t":
        mu = args.mu if args.mu is not None else 0.0
        sigma = args.sigma if args.sigma is not None else 1.0
        return StudentT(_require(args, "dof"), mu, sigma)
    if dist == "gamma":
        return GammaLoss(_require(args, "shape"), _require(args, "scale"))
    if dist == "lognormal":
        return LognormalLoss(_require(args, "mu"), _require(args, "sigma"))
    if dist == "pareto":
        return ParetoLoss(_require(args, "gamma"), args.scale if args.scale is not None else 1.0)
    if dist == "gpd":
        return GpdLoss(_require(args, "xi"), _require(args, "nu"), _require(args, "beta"))
    raise DomainError(f"unknown distribution {dist!r}")


def _require(args, name: str) -> float:
    value = getattr(args, name, None)
    if value is None:
        raise DomainError(f"--dist {args.dist} requires --{name}")
    return float(value)


def _cmd_pelve(args) -> int:
    risk = _risk_from_args(args)
    print(_fmt(pelve(risk, args.level, args.tol)))
    return 0


def _cmd_curve(args) -> int:
    columns = load_samples_csv(args.input)
    if args.col not in columns:
        raise DomainError(f"{args.input}: no column named {args.col!r}")
    risk = EmpiricalRisk(columns[args.col])
    table = measures.es_curve(risk, _parse_level_range(args.levels))
    measures.write_es_table(args.out, table)
    print(f"wrote {len(table)} levels to {args.out}")
    return 0


def _weights_from_choice(choice: str, insurers) -> np.ndarray:
    if choice == "equal":
        return multi.equal_weights(len(insurers))
    if choice == "assets":
        return casestudy.asset_share_weights(insurers)
    if choice == "inverse-assets":
        return casestudy.inverse_asset_weights(insurers)
    raise DomainError(f"unknown weights {choice!r}")


def _cmd_multi(args) -> int:
    config = casestudy.load_config(args.config)
    equity = casestudy.simulate_equity(config, workers=args.workers)
    risks = [EmpiricalRisk(equity[:, i]) for i in range(equity.shape[1])]
    weights = _weights_from_choice(args.weights, config.insurers)
    aggregation = "identity" if args.g == "identity" else "positive_part"
    if args.method == "a":
        value = multi.a_pelve(risks, args.level, weights, args.tol)
    elif args.method == "wc":
        value = multi.wc_pelve(risks, args.level, args.tol)
    elif args.method == "mse":
        value = multi.mse_pelve(risks, args.level, weights).leftmost
    else:
        value = multi.sys_pelve(risks, args.level, g=aggregation, tol=args.tol)
    print(_fmt(value))
    return 0


def _cmd_validate_curve(args) -> int:
    table = measures.read_es_table(args.input)
    verdict = escurve.validate_es_curve(table, tol=args.tol)
    if verdict.accepted:
        print("accepted")
        return 0
    print("rejected")
    for reason in verdict.reasons():
        print(reason)
    return 2


def _cmd_simulate(args) -> int:
    config = casestudy.load_config(args.config)
    equity = casestudy.simulate_equity(config, workers=args.workers)
    casestudy.write_samples_csv(args.out, equity, [ins.name for ins in config.insurers])
    print(f"wrote {equity.shape[0]} paths x {equity.shape[1]} insurers to {args.out}")
    return 0


def _cmd_report(args) -> int:
    config = casestudy.load_config(args.config)
    columns = load_samples_csv(args.samples)
    names = [ins.name for ins in config.insurers]
    missing = [name for name in names if name not in columns]
    if missing:
        raise DomainError(f"{args.samples}: missing insurer columns {missing}")
    equity = np.column_stack([columns[name] for name in names])
    spec = casestudy.benchmark_multi_spec(config.insurers)
    levels = _parse_level_range(args.levels)
    report = casestudy.reserve_report(equity, levels, spec, insurer_names=names)
    written = casestudy.write_report(args.outdir, report)
    for path in written:
        print(f"wrote {path}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="pelve", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("pelve", help="PELVE of a parametric distribution")
    p.add_argument("--dist", required=True,
                   choices=["constant", "normal", "student-t", "gamma", "lognormal", "pareto", "gpd"])
    p.add_argument("--level", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    for flag in ("value", "mu", "sigma", "dof", "shape", "scale", "gamma", "xi", "nu", "beta"):
        p.add_argument(f"--{flag}", type=float)
    p.set_defaults(func=_cmd_pelve)

    p = sub.add_parser("curve", help="ES curve of an empirical CSV column")
    p.add_argument("--input", required=True)
    p.add_argument("--col", required=True)
    p.add_argument("--levels", required=True, help="a:b:N log-spaced levels in [a,b]")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_curve)

    p = sub.add_parser("multi", help="multi-agent PELVE over a simulated config")
    p.add_argument("--config", required=True)
    p.add_argument("--method", required=True, choices=["a", "wc", "mse", "sys"])
    p.add_argument("--level", type=float, required=True)
    p.add_argument("--weights", default="equal", choices=["equal", "assets", "inverse-assets"])
    p.add_argument("--g", default="pospart", choices=["identity", "pospart"])
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_multi)

    p = sub.add_parser("validate-curve", help="check a level,es CSV against the ES-curve conditions")
    p.add_argument("--input", required=True)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=_cmd_validate_curve)

    p = sub.add_parser("simulate", help="simulate equity samples for a config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("report", help="reserve-change report from simulated samples")
    p.add_argument("--samples", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--outdir", required=True)
    p.add_argument("--levels", default="0.005:0.1:50")
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (DomainError, InfiniteMeanError, escurve.CurveShapeError, FileNotFoundError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"runtime error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

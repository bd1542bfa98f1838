"""PELVE and multi-agent PELVE calibration of Expected Shortfall levels.

Payoff-convention risk measures (VaR, ES), the probability-equivalent
level multiplier matching them (PELVE), four multi-agent calibration
methods (average, worst-case, least-squares, systemic), ES-curve
validation and construction, elliptical and heavy-tail reductions, and
a six-insurer balance-sheet Monte-Carlo case study.
"""

from .asymptotics import (
    EllipticalSpec,
    elliptical_reduction_check,
    marginal_risk,
    mvr_convergence_check,
    mvr_limit,
    standard_generator_risk,
)
from .core import (
    DEFAULT_TOL,
    Jump,
    PelveCurve,
    continuity_diagnostic,
    pelve,
    pelve_curve,
    read_pelve_curve,
    write_pelve_curve,
)
from .escurve import (
    CurveShapeError,
    CurveValidation,
    ShapeClass,
    build_mse_counterexample,
    classify_shape,
    quantile_from_es_curve,
    risk_from_table,
    validate_es_curve,
)
from .measures import (
    EsCurveTable,
    ReserveStat,
    es,
    es_curve,
    es_many,
    read_es_table,
    reserve_stat,
    var,
    write_es_table,
)
from .multi import (
    MsePelveResult,
    a_pelve,
    equal_weights,
    mse_pelve,
    multi_pelve_curves,
    sys_pelve,
    wc_pelve,
    wc_pelve_from_definition,
)
from .risks import (
    Constant,
    DomainError,
    EmpiricalRisk,
    EsCurveRisk,
    GammaLoss,
    GpdLoss,
    InfiniteMeanError,
    LognormalLoss,
    Normal,
    ParetoLoss,
    StudentT,
    TabulatedEsCurveRisk,
    empirical_from_csv,
    load_samples_csv,
    parametric,
)

__version__ = "0.1.0"

__all__ = [
    "Constant",
    "CurveShapeError",
    "CurveValidation",
    "DEFAULT_TOL",
    "DomainError",
    "EllipticalSpec",
    "EmpiricalRisk",
    "EsCurveRisk",
    "EsCurveTable",
    "GammaLoss",
    "GpdLoss",
    "InfiniteMeanError",
    "Jump",
    "LognormalLoss",
    "MsePelveResult",
    "Normal",
    "ParetoLoss",
    "PelveCurve",
    "ReserveStat",
    "ShapeClass",
    "StudentT",
    "TabulatedEsCurveRisk",
    "a_pelve",
    "build_mse_counterexample",
    "classify_shape",
    "continuity_diagnostic",
    "elliptical_reduction_check",
    "empirical_from_csv",
    "equal_weights",
    "es",
    "es_curve",
    "es_many",
    "load_samples_csv",
    "marginal_risk",
    "mse_pelve",
    "multi_pelve_curves",
    "mvr_convergence_check",
    "mvr_limit",
    "parametric",
    "pelve",
    "pelve_curve",
    "quantile_from_es_curve",
    "read_es_table",
    "read_pelve_curve",
    "reserve_stat",
    "risk_from_table",
    "standard_generator_risk",
    "sys_pelve",
    "validate_es_curve",
    "var",
    "wc_pelve",
    "wc_pelve_from_definition",
    "write_es_table",
    "write_pelve_curve",
]

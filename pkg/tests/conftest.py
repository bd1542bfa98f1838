"""Shared helpers for the test suite."""

import numpy as np
import pytest

from pelve import (
    Constant,
    EmpiricalRisk,
    GammaLoss,
    GpdLoss,
    LognormalLoss,
    Normal,
    ParetoLoss,
    StudentT,
)


def sample_payoffs(risk, size: int, rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF sampling through the risk's own quantile function."""
    u = np.clip(rng.random(size), 1e-15, 1.0 - 1e-15)
    return np.asarray(risk.upper_quantile(u), dtype=float)


@pytest.fixture
def rng():
    return np.random.default_rng(987654321)


def parametric_catalog():
    """A spread of parametric risks covering every family and both ES paths."""
    return [
        Constant(5.0),
        Normal(0.0, 1.0),
        Normal(-2.0, 3.5),
        StudentT(4.0),
        StudentT(6.0, 1.0, 2.0),
        GammaLoss(2.0, 3.0),
        GammaLoss(6996.42, 5.77),
        LognormalLoss(0.5, 0.8),
        ParetoLoss(2.0),
        ParetoLoss(3.0, 2.0),
        GpdLoss(0.4185, 281203.0, 4021.0),
        GpdLoss(0.0, 10.0, 2.0),
        GpdLoss(-0.5, 1.0, 1.0),
    ]


def random_risk(rng: np.random.Generator):
    """One random parametric risk, spanning light and heavy tails."""
    kind = rng.integers(0, 6)
    if kind == 0:
        return Normal(rng.normal(0, 2), 0.3 + rng.random() * 3)
    if kind == 1:
        return StudentT(2.0 + rng.random() * 8, rng.normal(0, 1), 0.5 + rng.random())
    if kind == 2:
        return GammaLoss(0.5 + rng.random() * 5, 0.5 + rng.random() * 3)
    if kind == 3:
        return LognormalLoss(rng.normal(0, 1), 0.2 + rng.random())
    if kind == 4:
        return ParetoLoss(1.5 + rng.random() * 4, 0.5 + rng.random())
    return GpdLoss(rng.random() * 0.6 - 0.2, rng.normal(0, 2), 0.5 + rng.random())

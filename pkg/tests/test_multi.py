"""Multi-agent methods: averages, worst case, least squares, systemic."""

import math

import numpy as np
import pytest

from conftest import random_risk
from pelve import (
    Constant,
    DomainError,
    EmpiricalRisk,
    Normal,
    ParetoLoss,
    a_pelve,
    equal_weights,
    es,
    mse_pelve,
    multi_pelve_curves,
    pelve,
    sys_pelve,
    var,
    wc_pelve,
    wc_pelve_from_definition,
)
from pelve.multi import check_weights, write_multi_curves

# frozen 1e6-point scan of the pareto-pair objective at lam = 0.05
MSE_PARETO_PAIR = 3.9125319125319127
# frozen closed-form bisection for ES_Z(c * 0.05) = 0.75 / 0.4
SYS_NORMAL_ORACLE = 1.5420209241543228


class TestWeights:
    def test_validation(self):
        check_weights([0.5, 0.5], 2)
        with pytest.raises(DomainError):
            check_weights([0.6, 0.6], 2)
        with pytest.raises(DomainError):
            check_weights([1.2, -0.2], 2)
        with pytest.raises(DomainError):
            check_weights([1.0], 2)
        with pytest.raises(DomainError):
            equal_weights(0)

    def test_empty_risk_vector_rejected(self):
        with pytest.raises(DomainError):
            a_pelve([], 0.1, [])
        with pytest.raises(DomainError):
            wc_pelve([], 0.1)


class TestAPelve:
    def test_identical_components(self):
        risk = ParetoLoss(2.0)
        value = a_pelve([risk, risk], 0.1, [0.3, 0.7])
        assert value == pytest.approx(pelve(risk, 0.1), abs=1e-9)

    def test_pareto_pair_closed_form(self):
        value = a_pelve([ParetoLoss(2.0), ParetoLoss(3.0)], 0.05, [0.5, 0.5])
        assert value == pytest.approx((4.0 + 1.5**3) / 2.0, abs=1e-6)

    def test_infinite_component_with_positive_weight(self):
        # the normal component fails existence at a level above one half
        value = a_pelve([Constant(5.0), Normal(10.0, 1.0)], 0.95, [0.5, 0.5])
        assert math.isinf(value)

    def test_zero_weight_infinite_component_ignored(self):
        value = a_pelve([Constant(5.0), Normal(10.0, 1.0)], 0.95, [1.0, 0.0])
        assert value == 1.0

    def test_between_min_and_max(self, rng):
        for _ in range(10):
            risks = [random_risk(rng) for _ in range(4)]
            lam = 0.05
            singles = [pelve(r, lam) for r in risks]
            if any(math.isinf(s) for s in singles):
                continue
            w = rng.random(4)
            w /= w.sum()
            value = a_pelve(risks, lam, w)
            assert min(singles) - 1e-9 <= value <= max(singles) + 1e-9


class TestWcPelve:
    def test_pareto_pair(self):
        assert wc_pelve([ParetoLoss(2.0), ParetoLoss(3.0)], 0.05) == pytest.approx(4.0, abs=1e-6)

    def test_identical(self):
        risk = Normal(0.0, 1.0)
        assert wc_pelve([risk, risk, risk], 0.05) == pytest.approx(pelve(risk, 0.05), abs=1e-12)

    def test_infinite_component(self):
        assert math.isinf(wc_pelve([Constant(5.0), ParetoLoss(2.0)], 0.3))
        assert math.isinf(wc_pelve_from_definition([Constant(5.0), ParetoLoss(2.0)], 0.3))

    def test_lemma_on_randomized_instances(self, rng):
        # definition-based and max-based computations agree
        for _ in range(30):
            n = int(rng.integers(1, 6))
            risks = [random_risk(rng) for _ in range(n)]
            lam = float(0.02 + rng.random() * 0.18)
            by_max = wc_pelve(risks, lam)
            by_def = wc_pelve_from_definition(risks, lam)
            if math.isinf(by_max) or math.isinf(by_def):
                assert math.isinf(by_max) and math.isinf(by_def)
            else:
                assert by_def == pytest.approx(by_max, abs=1e-8 * 10)


class TestMsePelve:
    def test_identical_components_zero_objective(self):
        risk = Normal(0.0, 1.0)
        lam = 0.05
        result = mse_pelve([risk, risk], lam, [0.25, 0.75])
        assert result.objective_at_min == pytest.approx(0.0, abs=1e-7)
        assert result.leftmost == pytest.approx(pelve(risk, lam), abs=1e-6)
        assert result.leftmost == result.plateau[0]

    def test_pareto_pair_interior_minimizer(self):
        result = mse_pelve([ParetoLoss(2.0), ParetoLoss(3.0)], 0.05, [0.5, 0.5])
        assert 1.5**3 < result.leftmost < 4.0
        assert result.leftmost == pytest.approx(MSE_PARETO_PAIR, abs=1e-3)

    def test_plateau_is_global_minimum(self, rng):
        # no multiplier anywhere beats the reported minimum materially
        risks = [ParetoLoss(2.0), Normal(0.0, 2.0)]
        lam = 0.05
        w = np.array([0.4, 0.6])
        result = mse_pelve(risks, lam, w)
        vars_ = np.array([var(r, lam) for r in risks])
        cs = np.linspace(1.0, 1.0 / lam, 4097)
        for c in cs:
            gaps = np.array([es(r, min(1.0, c * lam)) for r in risks]) - vars_
            objective = math.sqrt(float(w @ gaps**2))
            assert objective >= result.objective_at_min - 1e-9 * (1.0 + result.objective_at_min)

    def test_grid_size_guard(self):
        with pytest.raises(DomainError):
            mse_pelve([Constant(1.0)], 0.1, [1.0], grid_size=32)


class TestSysPelve:
    def test_single_risk_identity_reduces_to_pelve(self):
        risk = Normal(0.0, 1.0)
        assert sys_pelve([risk], 0.05, g="identity") == pytest.approx(pelve(risk, 0.05), abs=1e-6)

    def test_positive_part_strict_gap_example(self):
        risk = Normal(0.75, 0.4)
        lam = 0.05
        value = sys_pelve([risk], lam, g="positive_part")
        assert value == pytest.approx(SYS_NORMAL_ORACLE, abs=1e-6)
        assert value < pelve(risk, lam) - 0.05

    def test_positive_part_degenerate_at_one(self):
        # VaR and ES are already negative at the starting level
        assert sys_pelve([Normal(10.0, 0.4)], 0.05, g="positive_part") == 1.0

    def test_unknown_aggregation(self):
        with pytest.raises(DomainError):
            sys_pelve([Constant(1.0)], 0.1, g="square")

    def test_infinite_case(self):
        # identity aggregation inherits the single-agent existence failure
        assert math.isinf(sys_pelve([ParetoLoss(2.0)], 0.3, g="identity"))


class TestMultiCurves:
    def test_columns_and_csv(self, tmp_path):
        rng = np.random.default_rng(5)
        risks = [EmpiricalRisk(rng.normal(size=4000)), EmpiricalRisk(rng.normal(1.0, 2.0, size=4000))]
        levels = np.array([0.03, 0.05, 0.1])
        columns = multi_pelve_curves(risks, levels, [0.5, 0.5], [0.5, 0.5], grid_size=256)
        assert sorted(columns) == sorted(["a", "a_weighted", "wc", "mse", "mse_weighted", "sys"])
        np.testing.assert_allclose(columns["a"], columns["a_weighted"])
        assert np.all(columns["wc"] >= columns["a"] - 1e-9)
        path = tmp_path / "multi.csv"
        write_multi_curves(path, levels, columns)
        header = path.read_text().splitlines()[0]
        assert header == "level,a,a_weighted,wc,mse,mse_weighted,sys"

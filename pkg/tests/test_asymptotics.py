"""Elliptical reductions and regular-variation limits."""

import json
import math

import numpy as np
import pytest

from pelve import (
    Constant,
    DomainError,
    EllipticalSpec,
    Normal,
    ParetoLoss,
    StudentT,
    elliptical_reduction_check,
    marginal_risk,
    mvr_convergence_check,
    mvr_limit,
    pelve,
    standard_generator_risk,
    sys_pelve,
    var,
)


def random_psd_spec(rng, n, generator="normal", dof=None, zero_mean=True):
    a = rng.normal(size=(n, n))
    sigma = a @ a.T + 0.05 * np.eye(n)
    mu = np.zeros(n) if zero_mean else rng.normal(size=n)
    return EllipticalSpec(mu=mu, sigma=sigma, generator=generator, dof=dof)


class TestSpecValidation:
    def test_symmetry_and_psd(self):
        with pytest.raises(DomainError):
            EllipticalSpec(mu=np.zeros(2), sigma=np.array([[1.0, 0.5], [0.2, 1.0]]))
        with pytest.raises(DomainError):
            EllipticalSpec(mu=np.zeros(2), sigma=np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_student_t_needs_dof(self):
        with pytest.raises(DomainError):
            EllipticalSpec(mu=np.zeros(1), sigma=np.eye(1), generator="student_t")


class TestGeneratorAndMarginals:
    def test_standard_generator(self):
        spec = EllipticalSpec(mu=np.zeros(2), sigma=np.eye(2))
        z = standard_generator_risk(spec)
        assert isinstance(z, Normal) and z.mu == 0.0 and z.sigma == 1.0
        spec_t = EllipticalSpec(mu=np.zeros(2), sigma=np.eye(2), generator="student_t", dof=4.0)
        zt = standard_generator_risk(spec_t)
        assert isinstance(zt, StudentT) and zt.dof == 4.0

    def test_identity_marginals(self):
        spec = EllipticalSpec(mu=np.zeros(2), sigma=np.eye(2))
        for i in range(2):
            m = marginal_risk(spec, i)
            assert isinstance(m, Normal) and m.mu == 0.0 and m.sigma == 1.0

    def test_scaled_marginal(self):
        spec = EllipticalSpec(mu=np.array([0.75, 0.0]), sigma=np.diag([0.16, 1.0]))
        m = marginal_risk(spec, 0)
        assert isinstance(m, Normal)
        assert m.mu == 0.75 and m.sigma == pytest.approx(0.4)

    def test_degenerate_marginal_is_constant(self):
        spec = EllipticalSpec(mu=np.array([3.0]), sigma=np.array([[0.0]]))
        m = marginal_risk(spec, 0)
        assert isinstance(m, Constant) and m.value == 3.0

    def test_index_bounds(self):
        spec = EllipticalSpec(mu=np.zeros(2), sigma=np.eye(2))
        with pytest.raises(DomainError):
            marginal_risk(spec, 2)

    def test_marginal_pelve_independent_of_location_and_scale(self, rng):
        lam = 0.05
        base = pelve(Normal(0.0, 1.0), lam)
        for _ in range(8):
            spec = random_psd_spec(rng, 3, zero_mean=False)
            i = int(rng.integers(0, 3))
            assert pelve(marginal_risk(spec, i), lam) == pytest.approx(base, abs=1e-7)


class TestEllipticalReduction:
    def test_randomized_normal_specs(self, rng):
        for _ in range(5):
            n = int(rng.integers(1, 6))
            report = elliptical_reduction_check(random_psd_spec(rng, n), 0.05, tol=1e-5)
            assert report.passed, report.to_json()

    def test_student_t_spec(self, rng):
        report = elliptical_reduction_check(
            random_psd_spec(rng, 3, generator="student_t", dof=4.0), 0.05, tol=1e-5
        )
        assert report.passed, report.to_json()

    def test_strict_gap_spec(self):
        # mu/sigma = 1.875 above VaR(Z): the positive-part systemic value drops
        spec = EllipticalSpec(mu=np.array([0.75]), sigma=np.array([[0.16]]))
        report = elliptical_reduction_check(spec, 0.05, tol=1e-6)
        assert report.passed, report.to_json()
        by_name = {a.name: a for a in report.assertions}
        assert "sys_pelve(positive_part) strictly below pelve(Z)" in by_name

    def test_zero_mean_single_spec_has_equality(self):
        spec = EllipticalSpec(mu=np.zeros(1), sigma=np.eye(1))
        report = elliptical_reduction_check(spec, 0.05, tol=1e-6)
        by_name = {a.name: a for a in report.assertions}
        assert "sys_pelve(positive_part) equals pelve(Z)" in by_name
        assert report.passed

    def test_report_serializes_to_json(self, rng):
        report = elliptical_reduction_check(random_psd_spec(rng, 2), 0.05)
        payload = json.loads(report.to_json())
        assert payload["passed"] is True
        assert {"name", "lhs", "rhs", "tolerance", "pass"} <= set(payload["assertions"][0])

    def test_sys_positive_part_never_exceeds_generator_pelve(self, rng):
        lam = 0.05
        for _ in range(6):
            n = int(rng.integers(1, 5))
            spec = random_psd_spec(rng, n, zero_mean=False)
            marginals = [marginal_risk(spec, i) for i in range(n)]
            z = standard_generator_risk(spec)
            assert sys_pelve(marginals, lam, g="positive_part") <= pelve(z, lam) + 1e-7


class TestMvrLimit:
    def test_exact_values(self):
        assert mvr_limit(2.0) == 4.0
        assert mvr_limit(1.5) == pytest.approx(3.0**1.5, rel=1e-15)

    def test_approaches_euler(self):
        assert abs(mvr_limit(1000.0) - math.e) < 0.01

    def test_strictly_decreasing_and_above_euler(self):
        grid = np.exp(np.linspace(math.log(1.01), math.log(1000.0), 100))
        values = np.array([mvr_limit(float(g)) for g in grid])
        assert np.all(np.diff(values) < 0.0)
        assert np.all(values > math.e)

    def test_domain(self):
        with pytest.raises(DomainError):
            mvr_limit(1.0)
        with pytest.raises(DomainError):
            mvr_limit(0.5)


class TestMvrConvergence:
    def test_analytic_pareto_hits_limit_at_finite_levels(self):
        report = mvr_convergence_check(2.0, [0.1, 0.01], sample_size=None)
        assert report.passed, report.to_json()
        for a in report.assertions:
            assert a.lhs == pytest.approx(4.0, abs=1e-6)

    def test_sampled_within_ten_percent(self):
        report = mvr_convergence_check(3.0, [0.02, 0.005], sample_size=10**5, seed=11)
        assert report.passed, report.to_json()

    def test_identical_marginals_methods_coincide(self):
        report = mvr_convergence_check(2.0, [0.05], sample_size=None, n_risks=3)
        values = [a.lhs for a in report.assertions]
        assert max(values) - min(values) < 1e-6

    def test_grid_must_decrease(self):
        with pytest.raises(DomainError):
            mvr_convergence_check(2.0, [0.01, 0.1], sample_size=None)


class TestPositivePartCriterionSharpness:
    def test_example_parameters(self):
        # 0.75 / 0.4 = 1.875 > VaR(Z) at 5%: criterion fails, value strictly below
        spec = EllipticalSpec(mu=np.array([0.75]), sigma=np.array([[0.16]]))
        z = standard_generator_risk(spec)
        assert 0.75 / 0.4 > var(z, 0.05)
        marginals = [marginal_risk(spec, 0)]
        assert sys_pelve(marginals, 0.05, g="positive_part") < pelve(z, 0.05) - 0.05

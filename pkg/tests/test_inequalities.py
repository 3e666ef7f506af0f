"""
Tests for mpspec.inequalities
"""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mpspec import inequalities, measures
from mpspec.errors import NumericError, PreconditionError


class TestHelpers:
    @given(st.floats(min_value=1e-3, max_value=30.0))
    def test_half_tanh_identity(self, a):
        expected = (math.cosh(a) - 1.0) / (a * math.sinh(a))
        assert float(inequalities.half_tanh_ratio(a)) == pytest.approx(expected, rel=1e-9)

    def test_limits_at_zero(self):
        assert float(inequalities.half_tanh_ratio(0.0)) == 0.5
        assert float(inequalities.cosh_square_ratio(0.0)) == 0.5

    def test_cosh_square_ratio(self):
        x = 1.3
        expected = (math.cosh(x) - 1.0) / (x * x * math.cosh(x))
        assert float(inequalities.cosh_square_ratio(x)) == pytest.approx(expected, rel=1e-12)

    def test_iota(self):
        assert float(inequalities.iota(0.5)) == pytest.approx(0.6)
        r = 0.5
        assert float(inequalities.iota(0.5)) == pytest.approx((1.0 - r * r) / (1.0 + r * r))


class TestHyperbolicChecks:
    def test_all_rows_pass(self):
        rows = inequalities.hyperbolic_checks()
        assert len(rows) == 13
        assert [r.name for r in rows[:3]] == ["tanh_ratio_lower", "tanh_ratio_upper", "cosh_square"]
        failed = [r.name for r in rows if not r.passed]
        assert failed == []

    def test_custom_grid(self):
        rows = inequalities.hyperbolic_checks(np.array([-1.0, 0.0, 2.0]))
        assert all(r.passed for r in rows)
        assert rows[1].worst_point == 0.0

    def test_bad_grid(self):
        with pytest.raises(PreconditionError):
            inequalities.hyperbolic_checks(np.array([]))
        with pytest.raises(PreconditionError):
            inequalities.hyperbolic_checks(np.array([0.0, np.nan]))


class TestPoincare:
    @pytest.mark.parametrize(
        "name, target",
        [("two_sided_exp", 4.0), ("half_exp", 4.0), ("gaussian", 1.0), ("sech", 16.0 / math.pi ** 2)],
    )
    def test_known_constants(self, name, target):
        estimate = inequalities.poincare_estimate(measures.weight_by_name(name))
        assert estimate.converged
        assert estimate.refined == pytest.approx(target, rel=0.05)
        assert estimate.change <= 0.02

    def test_truncation_underestimates_exponential(self):
        estimate = inequalities.poincare_estimate(measures.two_sided_exp(), refine=False)
        assert estimate.estimate < 4.0
        assert estimate.refined is None
        assert math.isnan(estimate.change)

    @pytest.mark.parametrize("name", ["sech", "half_exp"])
    def test_exact_scaling(self, name):
        for check in inequalities.poincare_scaling_check(measures.weight_by_name(name)):
            assert check.ratio == pytest.approx(1.0, rel=1e-8)
            assert check.ok

    def test_workers_do_not_change_result(self, sech):
        a = inequalities.poincare_estimate(sech, M=2001)
        b = inequalities.poincare_estimate(sech, M=2001, workers=2)
        assert (a.estimate, a.refined) == (b.estimate, b.refined)

    def test_bad_arguments(self, sech):
        with pytest.raises(PreconditionError):
            inequalities.poincare_estimate(sech, M=2)
        with pytest.raises(PreconditionError):
            inequalities.poincare_estimate(sech, X=0.0)

    def test_infinite_log_density(self):
        holey = measures.custom("holey", log_density=lambda x: np.where(np.abs(x) < 1.0, -np.inf, -np.abs(x)))
        with pytest.raises(NumericError):
            inequalities.poincare_estimate(holey, M=101)


class TestPerturbation:
    def test_bound_values(self):
        assert inequalities.perturbation_bound(16.0 / math.pi ** 2) == pytest.approx(13.35, abs=0.01)
        assert inequalities.perturbation_bound(0.1) == pytest.approx(0.4)

    def test_sech_perturbation(self):
        check = inequalities.poincare_perturbation_check()
        assert check.ok
        assert check.slack > 0.0
        assert check.dilation == pytest.approx(2.0 * math.sqrt(check.base.estimate / math.e))
        assert check.dilated_constant == pytest.approx(math.e / 4.0, rel=1e-8)

    def test_no_dilation_below_threshold(self):
        narrow = measures.dilate(measures.gaussian(), 4.0)
        check = inequalities.poincare_perturbation_check(narrow, M=2001)
        assert check.base.estimate < math.e / 4.0
        assert check.dilation is None and check.dilated_constant is None

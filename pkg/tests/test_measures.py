"""
Tests for mpspec.measures
"""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mpspec import measures
from mpspec.errors import DomainError, UnsupportedCapabilityError
from mpspec.quadrature import integrate_line


@pytest.mark.parametrize("name", ["sech", "two_sided_exp", "nu2", "nu3", "half_exp", "gaussian"])
def test_probability_mass(name):
    w = measures.weight_by_name(name)
    assert measures.mass(w) == pytest.approx(1.0, rel=1e-9)


@pytest.mark.parametrize(
    "name, p, expected",
    [
        ("two_sided_exp", 2, 2.0),
        ("sech", 2, 1.0),
        ("nu2", 2, 2.0),
        ("half_exp", 1, 1.0),
        ("half_exp", 2, 2.0),
        ("gaussian", 4, 3.0),
    ],
)
def test_moments(name, p, expected):
    w = measures.weight_by_name(name)
    assert measures.moment(w, p) == pytest.approx(expected, rel=1e-8)


def test_odd_moment_of_symmetric_weight_is_zero(sech):
    assert measures.moment(sech, 3) == 0.0


def test_moment_order_must_be_natural(sech):
    with pytest.raises(DomainError):
        measures.moment(sech, 1.5)


class TestClosedForms:
    def test_sech_density_at_zero(self, sech):
        assert measures.density(sech, 0.0) == pytest.approx(0.5)

    def test_nu2_density_at_zero(self):
        assert measures.density(measures.nu_ell(2), 0.0) == pytest.approx(1.0 / math.pi, rel=1e-12)

    def test_gamma_formula_matches_sech_and_nu2(self):
        x = np.linspace(-20.0, 20.0, 81)
        one = measures._log_nu_ell_density(1)(x)
        two = measures._log_nu_ell_density(2)(x)
        np.testing.assert_allclose(one, measures.sech().log_density(x), atol=1e-12)
        np.testing.assert_allclose(two, measures.nu_ell(2).log_density(x), atol=1e-10)

    @given(st.floats(min_value=-1.5, max_value=1.5))
    def test_sech_mgf_is_secant(self, alpha):
        assert measures.mgf(measures.sech(), alpha) == pytest.approx(1.0 / math.cos(alpha))

    def test_mgf_against_quadrature(self):
        w = measures.nu_ell(2)
        alpha = 0.7
        numeric = measures.integrate_against(w, lambda x: np.exp(alpha * x))
        assert float(np.real(numeric)) == pytest.approx(measures.mgf(w, alpha), rel=1e-9)

    @pytest.mark.parametrize("ell", [1, 2, 3])
    @pytest.mark.parametrize("alpha", [0.0, 0.3, -0.3, 1.0, -1.0, 1.5, -1.5])
    def test_mgf_matches_log_space_quadrature(self, ell, alpha):
        w = measures.nu_ell(ell)
        numeric, _ = integrate_line(lambda x: np.exp(alpha * x + w.log_density(x)), breakpoints=tuple(w.kinks))
        assert float(numeric) == pytest.approx(measures.mgf(w, alpha), rel=1e-9)

    def test_tails_do_not_underflow_in_log_space(self, sech):
        assert np.isfinite(sech.log_density(700.0))
        assert sech.log_density(700.0) == pytest.approx(-math.log(2.0) - 0.5 * math.pi * 700.0 + math.log(2.0))


class TestDomainErrors:
    def test_mgf_outside_interval(self, sech):
        with pytest.raises(DomainError):
            measures.mgf(sech, 0.5 * math.pi)
        with pytest.raises(DomainError):
            measures.mgf(measures.two_sided_exp(), -1.0)

    def test_density_outside_support(self):
        with pytest.raises(DomainError):
            measures.density(measures.half_exp(), -1.0)

    def test_bad_ell(self):
        with pytest.raises(DomainError):
            measures.nu_ell(0)
        with pytest.raises(DomainError):
            measures.nu_ell(1.5)

    def test_unknown_name(self):
        with pytest.raises(DomainError):
            measures.weight_by_name("cauchy")

    def test_custom_without_capabilities(self):
        w = measures.custom("bare")
        with pytest.raises(UnsupportedCapabilityError):
            w.log_density(0.0)
        with pytest.raises(UnsupportedCapabilityError):
            measures.mgf(w, 0.1)

    def test_dilation_must_be_positive(self, sech):
        with pytest.raises(DomainError):
            measures.dilate(sech, 0.0)


class TestDerivedWeights:
    def test_nu_ell_one_is_sech(self):
        assert measures.nu_ell(1) == measures.sech()

    @pytest.mark.parametrize("lam", [0.5, 2.0])
    def test_dilation_keeps_mass_and_rescales_moments(self, lam):
        w = measures.dilate(measures.two_sided_exp(), lam)
        assert measures.mass(w) == pytest.approx(1.0, rel=1e-9)
        assert measures.moment(w, 2) == pytest.approx(2.0 / lam ** 2, rel=1e-8)
        assert measures.mgf(w, 0.5 * lam) == pytest.approx(1.0 / (1.0 - 0.25))
        assert w.scale == lam

    def test_log_perturbed_sech_is_normalized(self):
        w = measures.log_perturbed_sech()
        assert w.kind == measures.WeightKind.LOG_PERTURBED_SECH
        assert measures.mass(w) == pytest.approx(1.0, rel=1e-9)
        # log^2(e) = 1 at the origin, so the density there is 1 / (2 Z) with Z > 1
        assert measures.density(w, 0.0) < 0.5


def test_comparability_constants():
    x = np.linspace(-30.0, 30.0, 601)
    ok, lo, hi = measures.comparability_check(x)
    assert ok
    assert lo >= 1.0 - 1e-12
    assert hi == pytest.approx(2.0)


def test_truncation_point_of_sech(sech):
    x = measures.truncation(sech)
    assert sech.log_density(x) < measures.LOG_DENSITY_FLOOR
    assert sech.log_density(x - 0.5) >= measures.LOG_DENSITY_FLOOR

"""
Tests for mpspec.spectral
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as sp_integrate

from mpspec import functions, measures, orthopoly, spectral
from mpspec.errors import ContractError, PreconditionError, UnsupportedCapabilityError


class TestExpand:
    def test_identity_anchor(self, mp1):
        e = spectral.expand(functions.identity(), mp1, 8)
        np.testing.assert_allclose(e.coeffs, [0, 1, 0, 0, 0, 0, 0, 0, 0], atol=1e-13)
        assert spectral.weighted_sum(e, spectral.seq_k) == pytest.approx(1.0, rel=1e-12)

    def test_square_anchor(self, mp1):
        # x^2 = 2 P_2 + 1 under MP(1)
        e = spectral.expand(functions.square(), mp1, 8)
        np.testing.assert_allclose(e.coeffs[:3], [1.0, 0.0, 2.0], atol=1e-12)
        assert spectral.weighted_sum(e, spectral.seq_k) == pytest.approx(8.0, rel=1e-12)
        assert e.method == "gauss"
        assert e.norm_sq == pytest.approx(5.0, rel=1e-12)
        assert e.residual < 1e-10
        assert spectral.tail_error(e, 1) == pytest.approx(4.0, rel=1e-12)
        assert spectral.tail_error(e, 2) < 1e-10

    def test_higher_ell_norms(self):
        basis = orthopoly.mp_recurrence(2, 16)
        e = spectral.expand(functions.square(), basis, 4)
        # P_2 = (x^2 - 2) / 2, ||P_2||^2 = 3 under nu_2
        np.testing.assert_allclose(e.coeffs[:3], [2.0, 0.0, 2.0], atol=1e-12)
        assert float(np.sum(e.energies)) == pytest.approx(e.norm_sq, rel=1e-12)

    @pytest.mark.parametrize("k", [0, 2, 4, 10, 20])
    def test_panels_match_adaptive_quadrature(self, mp1, k):
        f = functions.gaussian_bump()
        panels = spectral.expand(f, mp1, 20)
        assert panels.method == "panels"
        reference, _ = sp_integrate.quad(
            lambda x: math.exp(-0.5 * x * x) * orthopoly.mp_eval(1, k, x).real * measures.density(measures.sech(), x),
            -40.0, 40.0, epsabs=1e-14, epsrel=1e-12, limit=400,
        )
        assert panels.coeffs[k] == pytest.approx(reference, rel=1e-8, abs=1e-12)

    def test_gauss_rule_is_only_approximate_off_polynomials(self, mp1):
        f = functions.gaussian_bump()
        panels = spectral.expand(f, mp1, 20)
        coarse = spectral.expand(f, mp1, 20, rule=spectral.default_rule(mp1, 50))
        fine = spectral.expand(f, mp1, 20, rule=spectral.default_rule(mp1, 200))
        assert np.max(np.abs(fine.coeffs - panels.coeffs)) < np.max(np.abs(coarse.coeffs - panels.coeffs))
        np.testing.assert_allclose(fine.coeffs, panels.coeffs, atol=1e-4)

    def test_laguerre_exponential(self):
        basis = orthopoly.laguerre_recurrence(24)
        e = spectral.expand(functions.exp_decay(), basis, 16)
        expected = 0.5 ** (np.arange(17) + 1)
        np.testing.assert_allclose(e.coeffs, expected, atol=1e-12)

    def test_bad_degree(self, mp1):
        with pytest.raises(PreconditionError):
            spectral.expand(functions.identity(), mp1, 257)
        with pytest.raises(PreconditionError):
            spectral.expand(functions.identity(), mp1, 20, rule=spectral.default_rule(mp1, 30))

    def test_tail_error_range(self, mp1):
        e = spectral.expand(functions.square(), mp1, 4)
        with pytest.raises(PreconditionError):
            spectral.tail_error(e, 4)
        np.testing.assert_allclose(spectral.tail_errors(e, [0, 1, 2]), [4.0, 4.0, 0.0], atol=1e-10)

    def test_negative_sequence_rejected(self, mp1):
        e = spectral.expand(functions.square(), mp1, 4)
        with pytest.raises(PreconditionError):
            spectral.weighted_sum(e, lambda k: -np.ones_like(k, dtype=float))

    def test_tail_bracket_uses_next_index(self, mp1):
        e = spectral.expand(functions.abs_clip(), mp1, 16)
        assert spectral.tail_bracket(e, spectral.seq_log2) == pytest.approx(
            math.log(math.e + 17.0) ** 2 * e.residual
        )

    def test_csv_dump(self, mp1, tmp_path):
        e = spectral.expand(functions.identity(), mp1, 3)
        path = tmp_path / "expansion.csv"
        spectral.dump_expansion_csv(e, str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == "k,f_k,tail"
        assert len(lines) == 5


class TestGammaPhi:
    @pytest.mark.parametrize("name", ["one", "log2", "pow0.5", "pow0.9"])
    @pytest.mark.parametrize("k", [1, 4, 64, 1024])
    def test_quadrature_matches_closed_form(self, name, k):
        p = spectral.PROFILE_FACTORIES[name]()
        assert spectral.gamma_phi(p, k) == pytest.approx(float(p.gamma(k)), rel=1e-9)

    def test_constant_profile(self):
        assert float(spectral.constant_profile().gamma(3)) == pytest.approx(6.0 / 7.0)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=1, max_value=1 << 14), st.sampled_from(["one", "log2", "pow0.5"]))
    def test_sandwich(self, k, name):
        p = spectral.PROFILE_FACTORIES[name]()
        result = spectral.gamma_sandwich_check(p, k, value=float(p.gamma(k)))
        assert result.ok
        assert result.lower_margin >= 0 and result.upper_margin >= 0

    def test_log2_growth_band(self, log2_profile):
        for k in (16, 256, 4096):
            ratio = float(log2_profile.gamma(k)) / math.log(k) ** 2
            assert 1.0 / 64.0 <= ratio <= 8.0

    def test_increasing_profile_rejected(self):
        up = spectral.WeightProfile(name="up", phi=lambda t: t, big_phi=lambda t: 0.5 * t * t)
        with pytest.raises(ContractError):
            spectral.gamma_sandwich_check(up, 4)

    def test_bad_arguments(self, log2_profile):
        with pytest.raises(PreconditionError):
            spectral.power_profile(1.0)
        with pytest.raises(PreconditionError):
            spectral.gamma_phi(log2_profile, 0)

    def test_profile_conventions(self, log2_profile):
        assert float(log2_profile.Phi(0.0)) == 0.0
        assert float(log2_profile.Phi(2.0)) == pytest.approx(2.0)
        assert float(log2_profile.phi_ext(1.5)) == 0.0


class TestMainTheorem:
    def test_identity_sides(self):
        sides = spectral.main_theorem_sides(functions.identity(), 16)
        assert sides.lhs == pytest.approx(math.log(math.e + 1.0) ** 2, rel=1e-10)
        assert sides.rhs59 > 1.0
        assert sides.rhs60 > 1.0
        assert math.isfinite(sides.ratio60)

    def test_requires_derivative(self):
        f = functions.StripFunction(name="bare", real_eval=np.cos)
        with pytest.raises(UnsupportedCapabilityError):
            spectral.main_theorem_sides(f, 8)

    def test_ratios_for_zero_sides(self):
        sides = spectral.MainTheoremSides(lhs=0.0, rhs59=0.0, rhs60=0.0)
        assert sides.ratio59 == 0.0 and sides.ratio60 == 0.0


class TestMeasureTransfer:
    def test_abs_clip_within_constants(self):
        result = spectral.measure_transfer_check(functions.abs_clip(), (1, 2, 4, 8))
        assert result.ok
        assert np.all(result.ratios >= 1.0 - 1e-9)
        assert np.all(result.ratios <= 2.0 + 1e-9)

    def test_constant_has_no_tail(self):
        tails, norms = spectral.stieltjes_tails(functions.constant(), [0, 3])
        assert np.all(tails <= 1e-12 * norms[:, None])

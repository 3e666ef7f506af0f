"""
Tests for mpspec.orthopoly
"""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpspec import orthopoly
from mpspec.errors import DomainError, PreconditionError, ResourceError


class TestRecurrence:
    def test_low_degree_polynomials(self, mp1):
        p = mp1.exact_polys(3)
        assert p[0].coeffs == (Fraction(1),)
        assert p[1].coeffs == (Fraction(0), Fraction(1))
        assert p[2].coeffs == (Fraction(-1, 2), Fraction(0), Fraction(1, 2))
        # 3 P_3 = x P_2 - 2 P_1
        assert p[3].coeffs == (Fraction(0), Fraction(-5, 6), Fraction(0), Fraction(1, 6))

    @pytest.mark.parametrize("ell", [1, 2, 3])
    def test_leading_coefficient(self, ell):
        basis = orthopoly.mp_recurrence(ell, 16)
        for k, p in enumerate(basis.exact_polys(12)):
            assert p.degree == k
            assert p.leading == Fraction(1, math.factorial(k))

    @pytest.mark.parametrize("ell", [1, 2, 3, 4])
    def test_generating_function_matches_recurrence(self, ell):
        basis = orthopoly.mp_recurrence(ell, 32)
        assert orthopoly.generating_taylor(ell, 30) == basis.exact_polys(30)

    def test_norms(self):
        basis = orthopoly.mp_recurrence(3, 8)
        expected = [math.comb(k + 2, k) for k in range(9)]
        np.testing.assert_array_equal(basis.norms_sq, expected)

    def test_recurrence_pairs(self):
        basis = orthopoly.mp_recurrence(2, 4)
        pairs = basis.recurrence
        assert pairs[0] == (0.0, 0.0)
        assert pairs[3][1] == pytest.approx(math.sqrt(3 * 4))

    def test_names(self, mp1):
        assert mp1.name == "MP(1)"
        assert orthopoly.laguerre_recurrence(4).name == "Laguerre(0)"


class TestGaussRule:
    @pytest.mark.parametrize("ell", [1, 2, 3])
    def test_discrete_orthonormality(self, ell):
        basis = orthopoly.mp_recurrence(ell, 64)
        rule = orthopoly.gauss_rule(basis, 40)
        q, log_scale = basis.orthonormal_table(rule.nodes, 30)
        q = q * np.exp(log_scale)[None, :]
        gram = (q * rule.weights[None, :]) @ q.T
        np.testing.assert_allclose(gram, np.eye(31), atol=1e-10)

    @pytest.mark.parametrize("ell", [1, 2, 3])
    def test_second_moment_is_ell(self, ell):
        rule = orthopoly.gauss_rule(orthopoly.mp_recurrence(ell, 32), 24)
        assert rule.integrate(np.ones_like) == pytest.approx(1.0, rel=1e-13)
        assert rule.integrate(lambda x: x * x) == pytest.approx(ell, rel=1e-12)

    def test_nodes_symmetric(self, mp1):
        rule = orthopoly.gauss_rule(mp1, 21)
        np.testing.assert_allclose(rule.nodes, -rule.nodes[::-1], atol=1e-12)
        assert np.all(np.diff(rule.nodes) > 0)

    @pytest.mark.parametrize("n", [5, 20, 60])
    @pytest.mark.parametrize("basis", [orthopoly.mp_recurrence(1, 64), orthopoly.mp_recurrence(3, 64),
                                       orthopoly.laguerre_recurrence(64)], ids=["mp1", "mp3", "laguerre"])
    def test_nodes_interlace(self, basis, n):
        inner = orthopoly.gauss_rule(basis, n).nodes
        outer = orthopoly.gauss_rule(basis, n + 1).nodes
        assert np.all(outer[:-1] < inner)
        assert np.all(inner < outer[1:])

    def test_weights_positive_and_tiny_weights_resolved(self, mp1):
        rule = orthopoly.gauss_rule(mp1, 120)
        assert np.all(rule.weights > 0)
        assert rule.weights.min() < 1e-60

    @pytest.mark.parametrize("k", [0, 3, 7])
    def test_laguerre_rule_factorial_moments(self, k):
        rule = orthopoly.gauss_rule(orthopoly.laguerre_recurrence(16), 12)
        assert rule.integrate(lambda x: x ** k) == pytest.approx(math.factorial(k), rel=1e-12)

    def test_rule_size_checked(self, mp1):
        with pytest.raises(PreconditionError):
            orthopoly.gauss_rule(mp1, 0)
        with pytest.raises(PreconditionError):
            orthopoly.gauss_rule(mp1, 257)

    @pytest.mark.parametrize("ell", [1, 2, 3])
    def test_panel_gram_to_degree_sixty(self, ell):
        gram = orthopoly.mp_gram(ell, 60)
        norms = np.array([math.comb(k + ell - 1, k) for k in range(61)], dtype=float)
        np.testing.assert_allclose(gram / np.sqrt(np.outer(norms, norms)), np.eye(61), atol=1e-9)

    @pytest.mark.parametrize("ell", [1, 2, 3])
    def test_table_norms_match_binomials(self, ell):
        basis = orthopoly.mp_recurrence(ell, 60)
        expected = [math.comb(k + ell - 1, k) for k in range(61)]
        np.testing.assert_allclose(basis.norms_sq[:61], expected, rtol=1e-12)

    def test_panel_gram_degree_checked(self):
        with pytest.raises(PreconditionError):
            orthopoly.mp_gram(1, 161)


class TestEvaluation:
    def test_values_match_exact_polys(self):
        basis = orthopoly.mp_recurrence(2, 12)
        x = np.linspace(-4.0, 4.0, 9)
        exact = basis.exact_polys(8)
        values = basis.values(x, 8)
        for k in range(9):
            np.testing.assert_allclose(values[k], [float(exact[k](Fraction(v))) for v in x], rtol=1e-12, atol=1e-12)

    def test_mp_eval_complex(self):
        assert orthopoly.mp_eval(1, 2, 0.5) == pytest.approx(-0.375)
        assert orthopoly.mp_eval(1, 2, 1j) == pytest.approx(-1.0)
        assert orthopoly.mp_eval(1, 0, 3.0 + 2.0j) == 1.0

    @settings(max_examples=25, deadline=None)
    @given(st.floats(min_value=-5.0, max_value=5.0), st.integers(min_value=0, max_value=10))
    def test_mp_eval_agrees_with_table(self, x, k):
        basis = orthopoly.mp_recurrence(1, 12)
        assert orthopoly.mp_eval(1, k, x).real == pytest.approx(basis.values(x, k)[k, 0], rel=1e-10, abs=1e-10)

    def test_project_matches_table(self, mp1):
        x = np.linspace(-60.0, 60.0, 301)
        g = np.exp(-np.abs(x))
        q, log_scale = mp1.orthonormal_table(x, 40)
        table = q * np.exp(log_scale)[None, :]
        expected = table @ g
        scale = np.abs(table) @ np.abs(g)
        assert np.all(np.abs(mp1.project(x, g, 40) - expected) <= 1e-12 * scale)

    def test_laguerre_derivatives_orthogonal(self):
        # int L_k' L_m' x e^{-x} dx = k delta_km; the integrand has degree <= 79
        rule = orthopoly.gauss_rule(orthopoly.laguerre_recurrence(80), 64)
        d = np.array([orthopoly.laguerre_deriv(k, rule.nodes) for k in range(41)])
        gram = (d * (rule.weights * rule.nodes)[None, :]) @ d.T
        np.testing.assert_allclose(gram, np.diag(np.arange(41.0)), atol=1e-7)

    def test_mp_eval_degree_cap(self):
        exact = orthopoly.mp_recurrence(1, 8).exact_polys(8)[8]
        assert orthopoly.mp_eval(1, 8, 0.0, degree_cap=8) == pytest.approx(float(exact(Fraction(0))))
        with pytest.raises(ResourceError):
            orthopoly.mp_eval(1, 9, 0.0, degree_cap=8)
        with pytest.raises(ResourceError):
            orthopoly.mp_eval(1, (1 << 16) + 1, 0.0)

    def test_laguerre_values_and_derivative(self):
        basis = orthopoly.laguerre_recurrence(8)
        x = np.array([0.0, 1.0, 3.0])
        np.testing.assert_allclose(basis.values(x, 2)[2], orthopoly.laguerre_eval(2, x))
        np.testing.assert_allclose(orthopoly.laguerre_eval(2, x), 0.5 * x * x - 2.0 * x + 1.0)
        np.testing.assert_allclose(orthopoly.laguerre_deriv(2, x), x - 2.0)


class TestErrors:
    def test_bad_parameters(self):
        with pytest.raises(DomainError):
            orthopoly.mp_recurrence(0, 8)
        with pytest.raises(DomainError):
            orthopoly.mp_recurrence(1, 0)
        with pytest.raises(ResourceError):
            orthopoly.mp_recurrence(1, (1 << 16) + 1)
        with pytest.raises(DomainError):
            orthopoly.laguerre_recurrence(8, alpha=-0.5)
        with pytest.raises(DomainError):
            orthopoly.mp_eval(1, -1, 0.0)

    def test_exact_budget(self, mp1):
        with pytest.raises(ResourceError):
            mp1.exact_polys(200)

    def test_table_cap(self):
        with pytest.raises(PreconditionError):
            orthopoly.mp_recurrence(1, 4).orthonormal_table(0.0, 5)

    def test_zero_leading_coefficient(self):
        with pytest.raises(DomainError):
            orthopoly.PolyExact((Fraction(1), Fraction(0)))


class TestDumps:
    def test_recurrence_csv(self, tmp_path):
        path = tmp_path / "recurrence.csv"
        orthopoly.dump_recurrence_csv(orthopoly.mp_recurrence(2, 4), str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == "k,a_k,b_k,norm_sq"
        assert len(lines) == 6
        assert lines[3].split(",")[3] == "3"

    def test_rule_csv(self, tmp_path, mp1):
        path = tmp_path / "rule.csv"
        rule = orthopoly.gauss_rule(mp1, 9)
        orthopoly.dump_rule_csv(rule, str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == "node,weight"
        assert len(lines) == 10
        assert float(lines[5].split(",")[0]) == pytest.approx(0.0, abs=1e-12)
        assert sum(float(line.split(",")[1]) for line in lines[1:]) == pytest.approx(1.0, rel=1e-13)

"""
Tests for mpspec.quadrature
"""

import math

import numpy as np
import pytest

from mpspec import quadrature
from mpspec.errors import IntegrationError


def test_panel_edges_align_to_width():
    edges = quadrature.panel_edges(-1.1, 0.9, 0.5, breakpoints=(0.3,))
    np.testing.assert_allclose(edges, [-1.1, -1.0, -0.5, 0.0, 0.3, 0.5, 0.9])


def test_empty_interval():
    nodes, weights = quadrature.panel_rule(1.0, 1.0)
    assert nodes.size == 0 and weights.size == 0
    assert quadrature.integrate(np.cos, 2.0, 1.0) == 0.0


def test_kink_at_panel_edge_is_exact():
    assert quadrature.integrate(np.abs, -1.0, 2.0) == pytest.approx(2.5, rel=1e-14)


def test_integrate_line_gaussian():
    value, extent = quadrature.integrate_line(lambda x: np.exp(-0.5 * x * x))
    assert value == pytest.approx(math.sqrt(2.0 * math.pi), rel=1e-13)
    assert extent > 8.0


def test_integrate_line_half_line():
    value, _ = quadrature.integrate_line(lambda x: np.exp(-x), half_line=True)
    assert value == pytest.approx(1.0, rel=1e-13)


def test_divergent_integral_raises():
    with pytest.raises(IntegrationError):
        quadrature.integrate_line(lambda x: 1.0 / (1.0 + np.abs(x)), max_extent=64.0)


def test_non_finite_integrand_raises():
    with pytest.raises(IntegrationError):
        quadrature.integrate_line(lambda x: np.exp(x * x))


@pytest.mark.parametrize("v", [0.0, 1.0, 3.0, 12.0])
def test_fourier_of_gaussian(v):
    g_hat = quadrature.fourier(lambda x: np.exp(-0.5 * x * x), v, extent=40.0)
    assert g_hat[0].real == pytest.approx(math.sqrt(2.0 * math.pi) * math.exp(-0.5 * v * v), abs=1e-13)
    assert abs(g_hat[0].imag) < 1e-13

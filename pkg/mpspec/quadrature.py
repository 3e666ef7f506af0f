"""
Composite Gauss-Legendre quadrature on panels, outward marching integrals
on the real line, and oscillatory Fourier integrals.

All integrands are evaluated vectorised on numpy arrays. Panel edges sit at
integer multiples of the panel width so that kinks at such points (0, ±1,
±2, ...) never fall inside a panel; further kinks are passed as breakpoints.
"""

import logging
import math
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from config.settings import (
    FOURIER_PANELS_PER_UNIT_FREQ,
    FOURIER_REFINE_SWITCH,
    MARCH_BLOCK,
    MARCH_MAX_EXTENT,
    MARCH_RTOL,
    PANEL_ORDER,
    PANEL_WIDTH,
)
from mpspec.errors import IntegrationError

logger = logging.getLogger(__name__)


@lru_cache(maxsize=64)
def gauss_legendre(order):
    """Nodes and weights of the order-point Gauss-Legendre rule on [-1, 1]."""
    t, w = leggauss(order)
    t.setflags(write=False)
    w.setflags(write=False)
    return t, w


def panel_edges(a, b, width, breakpoints=()):
    """Panel edges covering [a, b] aligned to multiples of width."""
    first = math.floor(a / width) + 1
    last = math.ceil(b / width) - 1
    inner = [k * width for k in range(first, last + 1)]
    inner.extend(p for p in breakpoints if a < p < b)
    edges = np.unique(np.asarray([a, b] + inner, dtype=float))
    return edges


def panel_rule(a, b, width=PANEL_WIDTH, order=PANEL_ORDER, breakpoints=()):
    """Composite Gauss-Legendre nodes and weights on [a, b]."""
    if b <= a:
        return np.empty(0), np.empty(0)
    edges = panel_edges(a, b, width, breakpoints)
    t, w = gauss_legendre(order)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def integrate(fn, a, b, width=PANEL_WIDTH, order=PANEL_ORDER, breakpoints=()):
    """Integrate a vectorised fn over the finite interval [a, b]."""
    nodes, weights = panel_rule(a, b, width, order, breakpoints)
    if nodes.size == 0:
        return 0.0
    return np.sum(weights * fn(nodes))


def _march(fn, sign, breakpoints, width, order, min_extent, rtol, block, max_extent):
    total = 0.0
    lo = 0.0
    quiet = 0
    mirrored = tuple(sign * p for p in breakpoints if sign * p > 0)
    while True:
        hi = lo + block
        nodes, weights = panel_rule(lo, hi, width, order, mirrored)
        part = np.sum(weights * fn(sign * nodes))
        if not np.all(np.isfinite(part)):
            raise IntegrationError(f"non-finite integrand on [{lo}, {hi}] (direction {sign:+d})")
        total = total + part
        if hi >= min_extent and abs(part) <= rtol * abs(total):
            quiet += 1
            if quiet >= 2:
                return total, hi
        else:
            quiet = 0
        lo = hi
        if lo >= max_extent:
            raise IntegrationError(
                f"integral did not settle within |x| <= {max_extent} (last block {abs(part):.3e})"
            )


def integrate_line(
    fn,
    breakpoints=(),
    width=PANEL_WIDTH,
    order=PANEL_ORDER,
    min_extent=0.0,
    rtol=MARCH_RTOL,
    block=MARCH_BLOCK,
    max_extent=MARCH_MAX_EXTENT,
    half_line=False,
):
    """
    Integrate fn over the real line (or [0, inf) when half_line) by
    marching outward from 0 until consecutive blocks stop contributing.

    Returns:
        tuple: (value, extent reached)
    """
    right, ext_r = _march(fn, 1, breakpoints, width, order, min_extent, rtol, block, max_extent)
    if half_line:
        return right, ext_r
    left, ext_l = _march(fn, -1, breakpoints, width, order, min_extent, rtol, block, max_extent)
    extent = max(ext_r, ext_l)
    logger.debug("integrate_line settled at |x| <= %s", extent)
    return right + left, extent


def fourier(g, v, extent, width=PANEL_WIDTH, order=PANEL_ORDER, breakpoints=(), chunk=64):
    """
    Fourier transform g_hat(v) = integral of g(x) exp(i x v) over [-extent, extent].

    Oscillation is handled by shrinking the panels in proportion to |v| once
    |v| exceeds the switch frequency.

    Args:
        g: vectorised function of x (real or complex)
        v: scalar or array of frequencies
    """
    v = np.atleast_1d(np.asarray(v, dtype=float))
    out = np.empty(v.shape, dtype=complex)
    vmax = float(np.max(np.abs(v))) if v.size else 0.0
    refine = 1
    if vmax > FOURIER_REFINE_SWITCH:
        refine = int(math.ceil(FOURIER_PANELS_PER_UNIT_FREQ * vmax / FOURIER_REFINE_SWITCH))
    nodes, weights = panel_rule(-extent, extent, width / refine, order, breakpoints)
    gw = weights * g(nodes)
    for start in range(0, v.size, chunk):
        vs = v[start:start + chunk]
        phase = np.exp(1j * np.outer(vs, nodes))
        out[start:start + chunk] = phase @ gw
    return out

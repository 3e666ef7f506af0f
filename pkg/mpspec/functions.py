"""
Test functions with optional strip evaluation and derivative.

A StripFunction is evaluable on the real line; analytic members also carry
a complex evaluator on |Im z| <= 1 + delta together with a growth
certificate alpha (|f(R + iv)| <= M e^{alpha |R|}).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly

from mpspec.errors import DomainError, UnsupportedCapabilityError
from utils.helpers import SplitMix64

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StripFunction:
    name: str
    real_eval: Callable = field(repr=False)
    strip_eval: Optional[Callable] = field(default=None, repr=False)
    deriv: Optional[Callable] = field(default=None, repr=False)
    growth_alpha: Optional[float] = None
    kinks: Tuple[float, ...] = ()
    poly_coeffs: Optional[Tuple[float, ...]] = None
    real_on_real_line: bool = True

    def __call__(self, x):
        return self.real_eval(np.asarray(x, dtype=float))

    def eval(self, z):
        if self.strip_eval is None:
            raise UnsupportedCapabilityError(f"'{self.name}' has no strip evaluator")
        return self.strip_eval(np.asarray(z, dtype=complex))

    def derivative(self, x):
        if self.deriv is None:
            raise UnsupportedCapabilityError(f"'{self.name}' has no derivative")
        return self.deriv(np.asarray(x, dtype=float))

    @property
    def is_polynomial(self):
        return self.poly_coeffs is not None

    @property
    def degree(self):
        if self.poly_coeffs is None:
            raise UnsupportedCapabilityError(f"'{self.name}' is not a polynomial")
        return len(self.poly_coeffs) - 1


def polynomial(coeffs, name=None):
    """Polynomial with monomial coefficients (index = power)."""
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    if c.size == 0:
        c = np.zeros(1)
    dc = npoly.polyder(c) if c.size > 1 else np.zeros(1)
    return StripFunction(
        name=name or f"poly{c.size - 1}",
        real_eval=lambda x: npoly.polyval(x, c),
        strip_eval=lambda z: npoly.polyval(z, c),
        deriv=lambda x: npoly.polyval(x, dc),
        growth_alpha=0.0,
        poly_coeffs=tuple(c.tolist()),
    )


def constant(value=1.0):
    return polynomial([value], name="const")


def identity():
    return polynomial([0.0, 1.0], name="x")


def square():
    return polynomial([0.0, 0.0, 1.0], name="x2")


def abs_clip(c=1.0):
    """min(|x|, c): 1-Lipschitz, kinks at 0 and +-c."""
    if c <= 0:
        raise DomainError(f"clip level must be positive, got {c}")
    return StripFunction(
        name=f"abs_clip{c:g}",
        real_eval=lambda x: np.minimum(np.abs(x), c),
        deriv=lambda x: np.where(np.abs(x) < c, np.sign(x), 0.0),
        kinks=(-c, 0.0, c),
    )


def half_clip(c=1.0):
    """min(x, c) on the half line."""
    return StripFunction(
        name=f"half_clip{c:g}",
        real_eval=lambda x: np.minimum(x, c),
        deriv=lambda x: np.where(x < c, 1.0, 0.0),
        kinks=(c,),
    )


def gaussian_bump(scale=1.0):
    """e^{-scale^2 x^2 / 2}."""
    s2 = scale * scale
    return StripFunction(
        name=f"gaussian_bump{scale:g}",
        real_eval=lambda x: np.exp(-0.5 * s2 * x * x),
        strip_eval=lambda z: np.exp(-0.5 * s2 * z * z),
        deriv=lambda x: -s2 * x * np.exp(-0.5 * s2 * x * x),
        growth_alpha=0.0,
    )


def exp_decay():
    """e^{-x}, used on the half line."""
    return StripFunction(
        name="exp_decay",
        real_eval=lambda x: np.exp(-x),
        strip_eval=lambda z: np.exp(-z),
        deriv=lambda x: -np.exp(-x),
        growth_alpha=1.0,
    )


def random_polynomial(rng, max_degree, min_degree=1):
    """Degree uniform in [min_degree, max_degree], coefficients uniform in [-1, 1]."""
    degree = rng.integer(min_degree, max_degree)
    coeffs = rng.uniforms(degree + 1, -1.0, 1.0)
    if coeffs[-1] == 0.0:
        coeffs[-1] = 1.0
    return polynomial(coeffs, name=f"rand_poly{degree}")


def polynomial_suite(seed, count, max_degree, min_degree=1):
    rng = SplitMix64(seed)
    return [random_polynomial(rng, max_degree, min_degree) for _ in range(count)]


FUNCTION_FACTORIES = {
    "x": identity,
    "x2": square,
    "abs_clip": abs_clip,
    "abs_clip3": lambda: abs_clip(3.0),
    "gaussian_bump": gaussian_bump,
}

# Two-sided function and its half-line analogue for rate comparisons.
FUNCTION_PAIRS = {
    "abs_clip": (abs_clip, half_clip),
    "x2": (square, square),
    "gaussian_bump": (gaussian_bump, gaussian_bump),
}


def function_by_name(name):
    try:
        return FUNCTION_FACTORIES[name]()
    except KeyError:
        raise DomainError(f"unknown function '{name}'") from None


def pair_by_name(name):
    try:
        two, half = FUNCTION_PAIRS[name]
    except KeyError:
        raise DomainError(f"unknown function pair '{name}'") from None
    return two(), half()


def is_conjugate_symmetric(f, grid_re=(-3.0, -1.0, 0.0, 0.5, 2.0), grid_im=(-1.0, -0.5, 0.5, 1.0)):
    """Spot check eval(conj z) == conj(eval(z))."""
    z = (np.asarray(grid_re)[:, None] + 1j * np.asarray(grid_im)[None, :]).ravel()
    a = f.eval(np.conj(z))
    b = np.conj(f.eval(z))
    return bool(np.allclose(a, b, rtol=1e-12, atol=1e-300))


def growth_bound_holds(f, m_const, radii=(10.0, 30.0)):
    """Spot check |f(R + iv)| <= M e^{alpha |R|} for |v| <= 1."""
    if f.growth_alpha is None:
        raise UnsupportedCapabilityError(f"'{f.name}' has no growth certificate")
    v = np.linspace(-1.0, 1.0, 9)
    for r in radii:
        for sgn in (1.0, -1.0):
            vals = np.abs(f.eval(sgn * r + 1j * v))
            if np.any(vals > m_const * math.exp(f.growth_alpha * r)):
                return False
    return True

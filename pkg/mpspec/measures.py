"""
Probability weights on the real line

    two_sided_exp   mu_1      e^{-|x|} / 2
    sech            nu        1 / (2 cosh(pi x / 2))
    nu_ell(l)       nu_l      l-fold convolution of nu
    half_exp        mu~_1     e^{-x} on [0, inf)
    log_perturbed   nu~       log^2(e + |x|) nu / Z
    gaussian        custom    e^{-x^2/2} / sqrt(2 pi)

Densities are evaluated in log-space first so that tails at |x| ~ 70 never
underflow before they are multiplied by growing integrands.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.special import gammaln, loggamma

from config.settings import LOG_DENSITY_FLOOR, NU2_SERIES_CUTOFF, TRANSFER_BIG_C, TRANSFER_C
from mpspec.errors import DomainError, IntegrationError, UnsupportedCapabilityError
from mpspec.quadrature import integrate_line

logger = logging.getLogger(__name__)

LOG2 = math.log(2.0)
HALF_PI = 0.5 * math.pi


class WeightKind(str, Enum):
    TWO_SIDED_EXP = "two_sided_exp"
    SECH = "sech"
    NU_ELL = "nu_ell"
    HALF_EXP = "half_exp"
    LOG_PERTURBED_SECH = "log_perturbed_sech"
    CUSTOM = "custom"


@dataclass(frozen=True)
class Weight:
    """An immutable probability weight with optional closed-form mgf."""

    kind: WeightKind
    name: str
    log_density_fn: Optional[Callable] = field(default=None, compare=False, repr=False)
    support: Tuple[float, float] = (-math.inf, math.inf)
    ell: int = 1
    mgf_fn: Optional[Callable] = field(default=None, compare=False, repr=False)
    mgf_interval: Optional[Tuple[float, float]] = None
    symmetric: bool = True
    kinks: Tuple[float, ...] = ()
    scale: float = 1.0

    @property
    def half_line(self):
        return self.support[0] == 0.0 and math.isinf(self.support[1])

    def log_density(self, x):
        if self.log_density_fn is None:
            raise UnsupportedCapabilityError(f"weight '{self.name}' has no density")
        x = np.asarray(x, dtype=float)
        out = np.asarray(self.log_density_fn(x), dtype=float)
        lo, hi = self.support
        if not (math.isinf(lo) and math.isinf(hi)):
            out = np.where((x >= lo) & (x <= hi), out, -np.inf)
        return out

    def density(self, x):
        return np.exp(self.log_density(x))


# =============================================================================
# LOG-SPACE BUILDING BLOCKS
# =============================================================================

def log_cosh(y):
    """log cosh(y) without overflow."""
    a = np.abs(y)
    return a + np.log1p(np.exp(-2.0 * a)) - LOG2


def log_sinh_abs(y):
    """log sinh(|y|) for |y| > 0."""
    a = np.abs(y)
    return a + np.log(-np.expm1(-2.0 * a)) - LOG2


def log_x_over_sinh(x, c):
    """log(x / sinh(c x)) with the removable singularity at 0 filled in."""
    x = np.asarray(x, dtype=float)
    a = np.abs(x)
    small = a < NU2_SERIES_CUTOFF
    safe = np.where(small, 1.0, a)
    far = np.log(safe) - log_sinh_abs(c * safe)
    y2 = (c * a) ** 2
    near = -math.log(c) - np.log1p(y2 / 6.0 + y2 * y2 / 120.0)
    return np.where(small, near, far)


def _log_sech_density(x):
    return -LOG2 - log_cosh(HALF_PI * x)


def _log_nu2_density(x):
    return log_x_over_sinh(x, HALF_PI) - LOG2


def _log_nu_ell_density(ell):
    const = (ell - 2) * LOG2 - math.log(math.pi) - gammaln(ell)

    def fn(x):
        z = 0.5 * (ell + 1j * np.asarray(x, dtype=float))
        return const + 2.0 * np.real(loggamma(z))

    return fn


def _sec_power_mgf(ell):
    def fn(alpha):
        return 1.0 / math.cos(alpha) ** ell

    return fn


# =============================================================================
# CONSTRUCTORS
# =============================================================================

def two_sided_exp():
    return Weight(
        kind=WeightKind.TWO_SIDED_EXP,
        name="two_sided_exp",
        log_density_fn=lambda x: -np.abs(x) - LOG2,
        mgf_fn=lambda a: 1.0 / (1.0 - a * a),
        mgf_interval=(-1.0, 1.0),
        kinks=(0.0,),
    )


def sech():
    return Weight(
        kind=WeightKind.SECH,
        name="sech",
        log_density_fn=_log_sech_density,
        mgf_fn=_sec_power_mgf(1),
        mgf_interval=(-HALF_PI, HALF_PI),
    )


def nu_ell(ell):
    """nu_l; l = 1 is the sech weight itself."""
    if int(ell) != ell or ell < 1:
        raise DomainError(f"ell must be a positive integer, got {ell}")
    ell = int(ell)
    if ell == 1:
        return sech()
    log_fn = _log_nu2_density if ell == 2 else _log_nu_ell_density(ell)
    return Weight(
        kind=WeightKind.NU_ELL,
        name=f"nu{ell}",
        log_density_fn=log_fn,
        ell=ell,
        mgf_fn=_sec_power_mgf(ell),
        mgf_interval=(-HALF_PI, HALF_PI),
    )


def half_exp():
    return Weight(
        kind=WeightKind.HALF_EXP,
        name="half_exp",
        log_density_fn=lambda x: -x,
        support=(0.0, math.inf),
        mgf_fn=lambda a: 1.0 / (1.0 - a),
        mgf_interval=(-math.inf, 1.0),
        symmetric=False,
    )


def gaussian():
    return Weight(
        kind=WeightKind.CUSTOM,
        name="gaussian",
        log_density_fn=lambda x: -0.5 * x * x - 0.5 * math.log(2.0 * math.pi),
        mgf_fn=lambda a: math.exp(0.5 * a * a),
        mgf_interval=(-math.inf, math.inf),
    )


def custom(name, log_density=None, support=(-math.inf, math.inf), symmetric=False, kinks=()):
    return Weight(
        kind=WeightKind.CUSTOM,
        name=name,
        log_density_fn=log_density,
        support=support,
        symmetric=symmetric,
        kinks=tuple(kinks),
    )


def log_perturbed(base):
    """nu~ = log^2(e + |x|) base / Z, with Z computed once by quadrature."""
    z_value, _ = integrate_line(
        lambda x: np.log(math.e + np.abs(x)) ** 2 * base.density(x),
        breakpoints=base.kinks,
        half_line=base.half_line,
    )
    log_z = math.log(float(np.real(z_value)))
    logger.debug("log-perturbed %s: Z = %.15g", base.name, math.exp(log_z))

    def fn(x):
        return 2.0 * np.log(np.log(math.e + np.abs(x))) + base.log_density(x) - log_z

    kind = WeightKind.LOG_PERTURBED_SECH if base.kind == WeightKind.SECH else WeightKind.CUSTOM
    return Weight(
        kind=kind,
        name=f"log_perturbed_{base.name}",
        log_density_fn=fn,
        support=base.support,
        symmetric=base.symmetric,
        kinks=tuple(sorted(set(base.kinks) | {0.0})),
        scale=base.scale,
    )


@lru_cache(maxsize=1)
def log_perturbed_sech():
    return log_perturbed(sech())


def dilate(w, lam):
    """Law of X / lam for X ~ w: density lam * rho(lam x)."""
    if lam <= 0:
        raise DomainError(f"dilation factor must be positive, got {lam}")
    base_log = w.log_density
    log_lam = math.log(lam)
    mgf_fn = None
    interval = None
    if w.mgf_fn is not None:
        base_mgf = w.mgf_fn
        mgf_fn = lambda a: base_mgf(a / lam)
        interval = (w.mgf_interval[0] * lam, w.mgf_interval[1] * lam)
    return replace(
        w,
        name=f"{w.name}_dilated_{lam:g}",
        log_density_fn=lambda x: log_lam + base_log(lam * np.asarray(x, dtype=float)),
        support=(w.support[0] / lam, w.support[1] / lam),
        mgf_fn=mgf_fn,
        mgf_interval=interval,
        kinks=tuple(k / lam for k in w.kinks),
        scale=w.scale * lam,
    )


WEIGHT_FACTORIES = {
    "sech": sech,
    "two_sided_exp": two_sided_exp,
    "nu2": lambda: nu_ell(2),
    "nu3": lambda: nu_ell(3),
    "half_exp": half_exp,
    "gaussian": gaussian,
    "log_perturbed_sech": log_perturbed_sech,
}


def weight_by_name(name):
    try:
        return WEIGHT_FACTORIES[name]()
    except KeyError:
        raise DomainError(f"unknown weight '{name}'") from None


# =============================================================================
# OPERATIONS
# =============================================================================

def density(w, x):
    """Probability density of w at x (scalar or array)."""
    lo, hi = w.support
    if np.any((np.asarray(x) < lo) | (np.asarray(x) > hi)):
        raise DomainError(f"x outside the support of {w.name}")
    out = w.density(x)
    return float(out) if np.ndim(out) == 0 else out


def mgf(w, alpha):
    """Closed-form exponential moment of w at alpha."""
    if w.mgf_fn is None:
        raise UnsupportedCapabilityError(f"weight '{w.name}' has no closed-form mgf")
    lo, hi = w.mgf_interval
    if not lo < alpha < hi:
        raise DomainError(f"alpha={alpha} outside the mgf interval ({lo}, {hi}) of {w.name}")
    return w.mgf_fn(alpha)


def integrate_against(w, fn, breakpoints=()):
    """Integral of fn against w on its support, marching until converged."""
    value, _ = integrate_line(
        lambda x: fn(x) * w.density(x),
        breakpoints=tuple(w.kinks) + tuple(breakpoints),
        half_line=w.half_line,
    )
    return value


def mass(w):
    return float(np.real(integrate_against(w, np.ones_like)))


def moment(w, p):
    """p-th moment of w by adaptive quadrature; odd moments of symmetric weights are 0."""
    if int(p) != p or p < 0:
        raise DomainError(f"moment order must be a nonnegative integer, got {p}")
    if w.symmetric and p % 2 == 1:
        return 0.0
    try:
        value = integrate_against(w, lambda x: x ** p)
    except IntegrationError as exc:
        raise IntegrationError(f"moment {p} of {w.name} diverges: {exc}") from exc
    return float(np.real(value))


def truncation(w, slack=0.0, step=0.5, cap=1e4):
    """Smallest |x| beyond which log_density + slack stays below the floor."""
    x = step
    while x < cap:
        points = np.array([x, -x]) if not w.half_line else np.array([x])
        if np.all(w.log_density(points) + slack < LOG_DENSITY_FLOOR):
            return x
        x += step
    raise IntegrationError(f"no truncation point for {w.name} below |x| = {cap}")


def comparability_ratios(x):
    """e^{-|x|} divided by the pi/2-scaled sech profile 1/(2 cosh x)."""
    x = np.asarray(x, dtype=float)
    return np.exp(-np.abs(x) + LOG2 + log_cosh(x))


def comparability_check(x, c=TRANSFER_C, big_c=TRANSFER_BIG_C):
    """c/(2cosh x) <= e^{-|x|} <= C/(2cosh x) on the grid; returns (ok, min, max)."""
    r = comparability_ratios(x)
    lo, hi = float(np.min(r)), float(np.max(r))
    tol = 4 * np.finfo(float).eps
    return (lo >= c - tol and hi <= big_c + tol), lo, hi

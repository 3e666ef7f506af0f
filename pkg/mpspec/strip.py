r"""
Strip-analytic functionals.

For f analytic on |Im z| <= 1 the strip difference is
$\Delta_f(x) = f(x+i) - f(x-i)$ and, with the generating series
$G_f(s) = \sum_k f_k s^k$ of the MP(1) coefficients,

$$
    H_f'(z) = G_f'(\tan z) \sec^2 z = \int e^{xz} \psi_f(x) dx,
    \qquad \psi_f(x) = -\tfrac{i}{4} \Delta_f(x) \frac{x}{\sinh(\pi x/2)} .
$$

On the line $z = u + iv$ the right side is the Fourier transform of
$-\tfrac{i}{4} K_u \Delta_f$ with $K_u(x) = x e^{ux} / \sinh(\pi x/2)$. The
map $s \mapsto \arctan s$ sends $D(0, r)$ onto
$\{\theta + iy : \cosh 2y \le C_r \cos 2\theta\}$, $C_r = (1+r^2)/(1-r^2)$.
"""

import logging
import math
from dataclasses import dataclass
from math import comb

import numpy as np
from scipy import integrate as sp_integrate
from scipy import optimize

from config.settings import (
    DEPTH_XTOL,
    DISK_ANGULAR_NODES,
    DISK_RADIAL_NODES,
    KHAT_EXTENT,
    LEMMA22_U_NODES,
    LEMMA22_V_EXTENT,
    LEMMA22_V_ORDER,
    LEMMA22_V_PANEL,
    LEMMA22_X_ORDER,
    LEMMA22_X_PANEL,
    NU2_SERIES_CUTOFF,
)
from mpspec import measures, orthopoly, spectral
from mpspec.errors import (
    ContractError,
    DomainError,
    IntegrationError,
    NumericError,
    UnsupportedCapabilityError,
)
from mpspec.quadrature import fourier, gauss_legendre, integrate_line, panel_rule

logger = logging.getLogger(__name__)

HALF_PI = 0.5 * math.pi
QUARTER_PI = 0.25 * math.pi
SQRT2 = math.sqrt(2.0)


# =============================================================================
# STRIP DIFFERENCE AND KERNELS
# =============================================================================

def delta(f, x):
    """Delta_f(x) = f(x + i) - f(x - i)."""
    x = np.asarray(x, dtype=float)
    return f.eval(x + 1j) - f.eval(x - 1j)


def kernel_Ku(u, x):
    """K_u(x) = x e^{ux} / sinh(pi x / 2), K_u(0) = 2/pi."""
    if abs(u) > QUARTER_PI + 1e-15:
        raise DomainError(f"|u| must be <= pi/4, got {u}")
    x = np.asarray(x, dtype=float)
    return np.exp(u * x + measures.log_x_over_sinh(x, HALF_PI))


def kernel_K(x):
    """K(x) = 2 sinh(pi x / 8) / sinh(pi x / 2), K(0) = 1/2."""
    x = np.asarray(x, dtype=float)
    a = np.abs(x)
    small = a < NU2_SERIES_CUTOFF
    safe = np.where(small, 1.0, a)
    far = np.exp(
        measures.LOG2 + measures.log_sinh_abs(0.125 * math.pi * safe)
        - measures.log_sinh_abs(HALF_PI * safe)
    )
    p2 = (0.125 * math.pi * a) ** 2
    q2 = (HALF_PI * a) ** 2
    near = 0.5 * (1.0 + p2 / 6.0 + p2 * p2 / 120.0) / (1.0 + q2 / 6.0 + q2 * q2 / 120.0)
    return np.where(small, near, far)


def khat_closed(v):
    """Fourier transform of K: 4 / (1 + sqrt(2) cosh 2v)."""
    v = np.asarray(v, dtype=float)
    with np.errstate(over="ignore"):
        return 4.0 / (1.0 + SQRT2 * np.cosh(2.0 * v))


def khat_numeric(v, extent=KHAT_EXTENT):
    """int K(x) e^{ixv} dx by panel quadrature (K is even, so the value is real)."""
    return np.real(fourier(kernel_K, v, extent))


def cosh_transform_closed(v):
    """2 pi sinh(pi v / 4) / sinh(pi v), with value pi/2 at v = 0."""
    a = 0.25 * math.pi * abs(v)
    b = math.pi * abs(v)
    if a < 1e-12:
        return HALF_PI
    return 2.0 * math.pi * math.exp(a - b) * math.expm1(-2.0 * a) / math.expm1(-2.0 * b)


def cosh_transform_integral(v, extent=KHAT_EXTENT):
    """
    Numeric int e^{ixv} / (sqrt(2) cosh x + 1) dx against its closed form.

    Returns:
        tuple: (numeric, closed)
    """
    def g(x):
        return 1.0 / (1.0 + SQRT2 * np.cosh(x))

    numeric = float(np.real(fourier(g, v, extent)[0]))
    return numeric, cosh_transform_closed(v)


def dump_khat_csv(path, v_grid):
    from utils.report import write_csv

    v_grid = np.asarray(v_grid, dtype=float)
    write_csv(path, ("v", "khat_numeric", "khat_closed"),
              zip(v_grid.tolist(), khat_numeric(v_grid).tolist(), khat_closed(v_grid).tolist()))


# =============================================================================
# STRIP IDENTITY
# =============================================================================

def _require_certificate(f):
    if f.growth_alpha is None:
        raise ContractError(f"'{f.name}' carries no growth certificate")
    if f.growth_alpha >= QUARTER_PI:
        raise ContractError(f"growth certificate {f.growth_alpha} of '{f.name}' is not below pi/4")


def identity_rhs_general(f, ell):
    """(1/4) int |Delta_f|^2 d nu_{ell+1}."""
    _require_certificate(f)
    w = measures.nu_ell(ell + 1)
    value, extent = integrate_line(lambda x: np.abs(delta(f, x)) ** 2 * w.density(x))
    logger.debug("identity_rhs %s (ell=%d): truncated at |x| <= %g", f.name, ell, extent)
    return 0.25 * float(np.real(value))


def identity_rhs(f):
    """(1/4) int |Delta_f|^2 d nu_2, which equals sum_k k f_k^2."""
    return identity_rhs_general(f, 1)


def weighted_sum_general(f, ell, N=None):
    """sum_{k>=1} binom(k + ell - 1, ell) f_k^2 with f_k in the P^{(ell)} basis."""
    if N is None:
        if not f.is_polynomial:
            raise UnsupportedCapabilityError(f"'{f.name}' needs an explicit N")
        N = max(f.degree, 1)
    basis = orthopoly.mp_recurrence(ell, max(N, 1))
    e = spectral.expand(f, basis, N)
    return spectral.weighted_sum(e, lambda k: np.array([comb(int(j) + ell - 1, ell) for j in k], float))


def hf_prime(f, z):
    """H_f'(z) = int e^{xz} psi_f(x) dx for |Re z| < pi/2."""
    z = complex(z)
    if abs(z.real) >= HALF_PI:
        raise DomainError(f"|Re z| must be < pi/2, got {z.real}")

    def integrand(x):
        return -0.25j * delta(f, x) * np.exp(x * z + measures.log_x_over_sinh(x, HALF_PI))

    value, _ = integrate_line(integrand, breakpoints=tuple(f.kinks))
    return complex(value)


def hf_prime_from_coeffs(coeffs, z):
    """G_f'(tan z) sec^2 z from the MP(1) coefficients."""
    s = np.tan(complex(z))
    k = np.arange(1, len(coeffs))
    g_prime = np.sum(k * np.asarray(coeffs[1:]) * s ** (k - 1)) if k.size else 0.0
    return complex(g_prime / np.cos(complex(z)) ** 2)


# =============================================================================
# DISK GEOMETRY
# =============================================================================

@dataclass(frozen=True)
class DiskGeometry:
    """Image of D(0, r) under arctan."""

    r: float

    def __post_init__(self):
        if not 0.0 < self.r < 1.0:
            raise DomainError(f"radius must lie in (0, 1), got {self.r}")

    @property
    def C(self):
        r2 = self.r * self.r
        return (1.0 + r2) / (1.0 - r2)

    @property
    def half_width(self):
        """Largest |theta| in the image: arccos(1/C_r)/2."""
        return 0.5 * math.acos(1.0 / self.C)

    def radius(self, theta):
        c2 = self.C * math.cos(2.0 * theta)
        return c2 + math.sqrt(max(c2 * c2 - 1.0, 0.0))

    def inverse_root(self, theta):
        c2 = self.C * math.cos(2.0 * theta)
        return c2 - math.sqrt(max(c2 * c2 - 1.0, 0.0))


def disk_image_radius(theta, r):
    """R_{theta, r} = C_r cos 2theta + sqrt(C_r^2 cos^2 2theta - 1)."""
    geom = DiskGeometry(r)
    if abs(theta) > geom.half_width * (1.0 + 1e-12):
        raise DomainError(f"|theta| = {abs(theta)} exceeds the angular half-width {geom.half_width}")
    return geom.radius(theta)


def disk_image_defect(z, r):
    """cosh(2 Im z) / (C_r cos(2 Re z)) - 1; <= 0 inside the image, 0 on its boundary."""
    z = np.asarray(z, dtype=complex)
    c = DiskGeometry(r).C * np.cos(2.0 * z.real)
    with np.errstate(divide="ignore"):
        return np.where(c > 0.0, np.cosh(2.0 * z.imag) / np.where(c > 0.0, c, 1.0) - 1.0, np.inf)


def disk_image_contains(z, r, tol=1e-12):
    """z in arctan(D(0, r)) iff |Im z| <= (1/2) log R_{Re z, r} with |Re z| in range."""
    z = np.asarray(z, dtype=complex)
    inside = (np.abs(z.real) < QUARTER_PI) & (disk_image_defect(z, r) <= tol)
    return bool(inside) if inside.ndim == 0 else inside


def _depth_ratio(u, v):
    """(T - 1)/(T + 1) for T = cosh 2v / cos 2u, without cancellation."""
    su = np.sin(u)
    sv = np.sinh(v)
    return 2.0 * (sv * sv + su * su) / (np.cosh(2.0 * v) + np.cos(2.0 * u))


def strip_depth_closed(u, v):
    """a(u, v) = 1 - sqrt((T - 1)/(T + 1)); vectorised."""
    return 1.0 - np.sqrt(_depth_ratio(np.asarray(u, float), np.asarray(v, float)))


def strip_depth_a(u, v):
    """
    Greatest eps in (0, 1] with u + iv in arctan(D(0, 1 - eps)), by
    bisection; returns 0.0 (with a warning) when no eps is feasible.
    """
    if abs(u) >= QUARTER_PI:
        raise DomainError(f"|u| must be < pi/4, got {u}")
    cos2u = math.cos(2.0 * u)
    target = math.cosh(2.0 * v) if abs(v) < 350.0 else math.inf

    def slack(eps):
        r = 1.0 - eps
        c = (1.0 + r * r) / (eps * (2.0 - eps))
        return c * cos2u - target

    if slack(1.0) >= 0.0:
        return 1.0
    lo = DEPTH_XTOL
    if not math.isfinite(target) or slack(lo) < 0.0:
        logger.warning("strip_depth_a: no feasible eps at u=%g, v=%g", u, v)
        return 0.0
    return optimize.bisect(slack, lo, 1.0, xtol=DEPTH_XTOL, maxiter=200)


def depth_bounds(u, v):
    """(1/2pi)(pi - 4|u|)e^{-2|v|} and (pi - 4|u|)e^{-2|v|}."""
    upper = (math.pi - 4.0 * np.abs(u)) * np.exp(-2.0 * np.abs(v))
    return upper / (2.0 * math.pi), upper


# =============================================================================
# DISK INTEGRAL
# =============================================================================

def _mp1_coeffs(f):
    if not f.is_polynomial:
        raise UnsupportedCapabilityError(f"'{f.name}' is not a polynomial")
    n = max(f.degree, 1)
    return spectral.expand(f, orthopoly.mp_recurrence(1, n), n).coeffs


def _disk_energy(gp_coeffs, r):
    """int_{D(0, r)} |G'(s)|^2 dA by Gauss-Legendre in rho and the trapezoid rule in theta."""
    t, w = gauss_legendre(DISK_RADIAL_NODES)
    rho = 0.5 * r * (t + 1.0)
    theta = 2.0 * math.pi * np.arange(DISK_ANGULAR_NODES) / DISK_ANGULAR_NODES
    s = rho[:, None] * np.exp(1j * theta)[None, :]
    g = np.polynomial.polynomial.polyval(s, gp_coeffs)
    ring = np.mean(np.abs(g) ** 2, axis=1) * 2.0 * math.pi
    return 0.5 * r * float(np.sum(w * ring * rho))


def disk_integral_lhs(f, p):
    """int_0^1 phi(eps) int_{D(0, 1-eps)} |G_f'|^2 dA d eps by polar quadrature."""
    coeffs = _mp1_coeffs(f)
    k = np.arange(1, len(coeffs))
    gp = k * coeffs[1:] if k.size else np.zeros(1)
    if gp.size == 0:
        return 0.0

    def outer(eps):
        return _disk_energy(gp, 1.0 - eps)

    opts = dict(epsabs=0.0, epsrel=1e-11, limit=200)
    if p.power > 0.0:
        value, _ = sp_integrate.quad(outer, 0.0, 1.0, weight="alg", wvar=(-p.power, 0.0), **opts)
    else:
        value, _ = sp_integrate.quad(lambda e: outer(e) * float(p.phi(e)), 0.0, 1.0, **opts)
    if not math.isfinite(value):
        raise IntegrationError(f"disk integral of '{f.name}' diverges")
    return value


def disk_integral_rhs(f, p):
    """(pi/2) sum_k Gamma_phi(k) f_k^2."""
    coeffs = _mp1_coeffs(f)
    k = np.arange(1, len(coeffs))
    return HALF_PI * float(np.sum(p.gamma(k) * coeffs[1:] ** 2)) if k.size else 0.0


# =============================================================================
# GAMMA-WEIGHTED DOUBLE INTEGRAL
# =============================================================================

@dataclass(frozen=True)
class DoubleIntegralBounds:
    lower: float
    exact: float
    upper: float
    target: float

    @property
    def ok(self):
        return self.lower < self.target < self.upper


def _x_extent(f, u_max=QUARTER_PI, rel=1e-17, step=4.0, cap=400.0):
    def mag(x):
        return np.abs(kernel_Ku(u_max, x) * delta(f, x)) + np.abs(kernel_Ku(-u_max, x) * delta(f, x))

    grid = np.linspace(-8.0, 8.0, 161)
    scale = float(np.max(mag(grid)))
    x = 8.0
    while x < cap:
        if float(np.max(mag(np.array([x, -x])))) <= rel * scale:
            return x
        x += step
    raise IntegrationError(f"K_u Delta_f of '{f.name}' does not decay within |x| <= {cap}")


def _ft_grid(f, u_nodes, v_nodes, chunk=64):
    """|FT(K_u Delta_f)(v)|^2 on the (u, v) grid; rows u, columns v."""
    extent = _x_extent(f)
    x, wx = panel_rule(-extent, extent, LEMMA22_X_PANEL, LEMMA22_X_ORDER, tuple(f.kinks))
    d = delta(f, x)
    g = np.stack([wx * kernel_Ku(u, x) * d for u in u_nodes], axis=1)
    if not np.all(np.isfinite(g)):
        raise NumericError("non-finite K_u Delta_f", {"function": f.name, "extent": extent})
    out = np.empty((len(u_nodes), len(v_nodes)))
    for start in range(0, len(v_nodes), chunk):
        vs = v_nodes[start:start + chunk]
        phase = np.exp(1j * np.outer(vs, x))
        out[:, start:start + chunk] = (np.abs(phase @ g) ** 2).T
    logger.debug("double integral %s: %d x-nodes on |x| <= %g", f.name, len(x), extent)
    return out


def _u_rule():
    t, w = gauss_legendre(LEMMA22_U_NODES)
    half = 0.5 * QUARTER_PI
    right = half * (t + 1.0)
    nodes = np.concatenate([-right[::-1], right])
    weights = np.concatenate([w[::-1], w]) * half
    return nodes, weights


def lemma22_bounds(f, p, N=None):
    """
    (1/8pi) int int |FT(K_u Delta_f)(v)|^2 Phi(.) du dv with Phi evaluated
    at the lower depth bound, at a(u, v) itself and at the upper depth bound,
    together with the target sum_k Gamma_phi(k) f_k^2.
    """
    u, wu = _u_rule()
    v, wv = panel_rule(-LEMMA22_V_EXTENT, LEMMA22_V_EXTENT, LEMMA22_V_PANEL, LEMMA22_V_ORDER)
    ft2 = _ft_grid(f, u, v)
    uu, vv = np.meshgrid(u, v, indexing="ij")
    lo_arg, hi_arg = depth_bounds(uu, vv)
    a = strip_depth_closed(uu, vv)
    weights = np.outer(wu, wv) * ft2 / (8.0 * math.pi)
    lower = float(np.sum(weights * p.Phi(lo_arg)))
    exact = float(np.sum(weights * p.Phi(a)))
    upper = float(np.sum(weights * p.Phi(hi_arg)))

    if f.is_polynomial and N is None:
        coeffs = _mp1_coeffs(f)
    else:
        n = N or 256
        coeffs = spectral.expand(f, orthopoly.mp_recurrence(1, n), n).coeffs
    k = np.arange(1, len(coeffs))
    target = float(np.sum(p.gamma(k) * coeffs[1:] ** 2)) if k.size else 0.0
    logger.debug("double integral %s/%s: %.6g < %.6g < %.6g (exact %.6g)", f.name, p.name, lower, target, upper, exact)
    return DoubleIntegralBounds(lower=lower, exact=exact, upper=upper, target=target)

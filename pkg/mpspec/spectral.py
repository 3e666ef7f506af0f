"""
Spectral expansions, tail errors and coefficient functionals.

    expand                  f_k = <f, P_k> / ||P_k||^2 in a basis
    tail_error              E_n(f) = sum_{k>n} f_k^2 ||P_k||^2 (+ truncation residual)
    weighted_sum            sum_k seq(k) f_k^2
    gamma_phi               Gamma_phi(k) = 2k int_0^1 (1 - e)^{2k} phi(e) de
    gamma_sandwich_check    phi(1/k)/32 + (k/2)Phi(1/2k) <= Gamma_phi(k) <= 2k Phi(1/k) + phi(1/k)
    main_theorem_sides      sum log^2(e+k) f_k^2 against the Sobolev-type right-hand sides
    measure_transfer_check  tails under e^{-|x|} and 1/(2 cosh x) on a shared discretisation
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy import integrate as sp_integrate
from scipy.special import betaln, digamma, polygamma

from config.settings import (
    EXPANSION_PANEL_EXTENT,
    GAMMA_RTOL,
    LAGUERRE_PANEL_ORDER,
    LAGUERRE_PANEL_WIDTH,
    LAGUERRE_SQRT_EXTENT,
    PANEL_ORDER,
    PANEL_WIDTH,
    STIELTJES_EXTENT,
    STIELTJES_PANEL_ORDER,
    STIELTJES_PANEL_WIDTH,
    TRANSFER_BIG_C,
    TRANSFER_C,
)
from mpspec import measures, orthopoly
from mpspec.errors import (
    ContractError,
    IntegrationError,
    NumericError,
    PreconditionError,
    UnsupportedCapabilityError,
)
from mpspec.quadrature import panel_rule

logger = logging.getLogger(__name__)


# =============================================================================
# EXPANSIONS
# =============================================================================

@dataclass(frozen=True)
class SpectralExpansion:
    """Coefficients f_k (k = 0..N) of f in the family normalisation of basis."""

    basis: orthopoly.OrthoBasis = field(repr=False)
    coeffs: np.ndarray = field(repr=False)
    norm_sq: float
    rule_size: int
    method: str
    truncation: float
    name: str = ""

    @property
    def N(self):
        return len(self.coeffs) - 1

    @property
    def energies(self):
        """f_k^2 ||P_k||^2, the orthonormal squared coefficients."""
        return self.coeffs ** 2 * self.basis.norms_sq[: self.N + 1]

    @property
    def residual(self):
        """||f||^2 minus the energy captured up to N, clipped at 0."""
        return max(self.norm_sq - float(np.sum(self.energies)), 0.0)


@lru_cache(maxsize=32)
def _rule(family, param, n):
    if family == orthopoly.Family.MP:
        basis = orthopoly.mp_recurrence(int(param), n)
    else:
        basis = orthopoly.laguerre_recurrence(n, param)
    return orthopoly.gauss_rule(basis, n)


def default_rule(basis, n):
    """Gauss rule of size n for the family of basis (cached)."""
    return _rule(basis.family, basis.param, n)


def _checked(values, name):
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise NumericError(f"non-finite values of '{name}' at quadrature nodes", {"function": name})
    return values


def _expand_gauss(f, basis, N, rule):
    if rule.n < 2 * N:
        raise PreconditionError(f"rule size {rule.n} is smaller than 2N = {2 * N}")
    fx = _checked(f(rule.nodes), f.name)
    v = rule.vectors
    ortho = math.sqrt(basis.mass) * (v[: N + 1] @ (v[0] * fx))
    coeffs = ortho / np.sqrt(basis.norms_sq[: N + 1])
    norm_sq = float(np.sum(rule.weights * fx * fx))
    return SpectralExpansion(
        basis=basis,
        coeffs=coeffs,
        norm_sq=norm_sq,
        rule_size=rule.n,
        method="gauss",
        truncation=math.inf,
        name=f.name,
    )


def _panel_nodes(f, basis, extent):
    w = basis.weight()
    if basis.family == orthopoly.Family.LAGUERRE:
        t_max = math.sqrt(extent) if extent is not None else LAGUERRE_SQRT_EXTENT
        kinks = tuple(math.sqrt(k) for k in f.kinks if k > 0)
        t, wt = panel_rule(0.0, t_max, LAGUERRE_PANEL_WIDTH, LAGUERRE_PANEL_ORDER, kinks)
        x = t * t
        return x, 2.0 * t * wt * w.density(x), t_max * t_max
    extent = extent if extent is not None else EXPANSION_PANEL_EXTENT
    x, wx = panel_rule(-extent, extent, PANEL_WIDTH, PANEL_ORDER, tuple(f.kinks) + tuple(w.kinks))
    return x, wx * w.density(x), extent


def _expand_panels(f, basis, N, extent):
    x, wx, extent = _panel_nodes(f, basis, extent)
    fx = _checked(f(x), f.name)
    ortho = basis.project(x, wx * fx, N)
    coeffs = ortho / np.sqrt(basis.norms_sq[: N + 1])
    mass_f = wx * fx * fx
    norm_sq = float(np.sum(mass_f))
    logger.debug("expand %s: %d panel nodes on |x| <= %g, N=%d", f.name, len(x), extent, N)
    return SpectralExpansion(
        basis=basis,
        coeffs=coeffs,
        norm_sq=norm_sq,
        rule_size=len(x),
        method="panels",
        truncation=extent,
        name=f.name,
    )


def expand(f, basis, N, rule=None, extent=None):
    """
    Expand f in basis up to degree N.

    Polynomials (and any call with an explicit rule) use the Gauss rule of
    the basis; other functions use composite Gauss-Legendre panels aligned
    to their kinks. The Gauss rule is exact for polynomials only; on smooth
    non-polynomials under the sech weight it converges algebraically in n.
    """
    if N < 0 or N > basis.degree_cap:
        raise PreconditionError(f"N={N} must lie in [0, {basis.degree_cap}]")
    if rule is not None:
        return _expand_gauss(f, basis, N, rule)
    if f.is_polynomial:
        return _expand_gauss(f, basis, N, default_rule(basis, max(2 * N, f.degree + 1, 2)))
    return _expand_panels(f, basis, N, extent)


def tail_error(e, n):
    """E_n(f): energy above degree n plus the truncation residual."""
    if n < 0 or n >= e.N:
        raise PreconditionError(f"n={n} must lie in [0, {e.N})")
    return float(np.sum(e.energies[n + 1:])) + e.residual


def tail_errors(e, n_grid):
    return np.array([tail_error(e, n) for n in n_grid])


def _seq_values(seq, k):
    values = np.asarray(seq(k), dtype=float)
    if values.shape != k.shape:
        values = np.broadcast_to(values, k.shape)
    if np.any(values < 0):
        raise PreconditionError("weight sequence must be nonnegative")
    return values


def weighted_sum(e, seq, k_min=1):
    """sum_{k_min <= k <= N} seq(k) f_k^2."""
    k = np.arange(k_min, e.N + 1)
    value = float(np.sum(_seq_values(seq, k) * e.coeffs[k_min:] ** 2))
    logger.debug("weighted_sum %s: head %.6g, tail bracket %.3g", e.name, value, tail_bracket(e, seq))
    return value


def tail_bracket(e, seq):
    """Lower bound seq(N+1) * residual for the tail of a nondecreasing seq."""
    return float(_seq_values(seq, np.array([e.N + 1]))[0]) * e.residual


def seq_k(k):
    return np.asarray(k, dtype=float)


def seq_log2(k):
    return np.log(math.e + np.asarray(k, dtype=float)) ** 2


def dump_expansion_csv(e, path):
    from utils.report import write_csv

    tails = [tail_error(e, k) for k in range(e.N)] + [e.residual]
    write_csv(path, ("k", "f_k", "tail"), zip(range(e.N + 1), e.coeffs.tolist(), tails))


# =============================================================================
# WEIGHT PROFILES
# =============================================================================

@dataclass(frozen=True)
class WeightProfile:
    """
    A decreasing weight phi on (0, 1) with antiderivative Phi (Phi(0) = 0,
    constant beyond 1) and optional closed-form Gamma_phi.
    """

    name: str
    phi: Callable = field(repr=False)
    big_phi: Callable = field(repr=False)
    gamma_exact: Optional[Callable] = field(default=None, repr=False)
    power: float = 0.0

    def Phi(self, t):
        t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
        return np.where(t > 0.0, self.big_phi(np.where(t > 0.0, t, 1.0)), 0.0)

    def phi_ext(self, t):
        """phi with the convention phi = 0 outside (0, 1)."""
        t = np.asarray(t, dtype=float)
        inside = (t > 0.0) & (t < 1.0)
        return np.where(inside, self.phi(np.where(inside, t, 0.5)), 0.0)

    def gamma(self, k):
        """Gamma_phi at integer k (array ok); closed form when known."""
        if self.gamma_exact is not None:
            return self.gamma_exact(np.asarray(k, dtype=float))
        return np.vectorize(lambda kk: gamma_phi(self, int(kk)))(k)


def constant_profile():
    return WeightProfile(
        name="one",
        phi=lambda t: np.ones_like(t),
        big_phi=lambda t: t,
        gamma_exact=lambda k: 2.0 * k / (2.0 * k + 1.0),
    )


def _gamma_log2(k):
    a = digamma(1.0) - digamma(2.0 * k + 2.0)
    return 2.0 * k / (2.0 * k + 1.0) * (a * a + polygamma(1, 1.0) - polygamma(1, 2.0 * k + 2.0))


def log_squared_profile():
    return WeightProfile(
        name="log2",
        phi=lambda t: np.log(t) ** 2,
        big_phi=lambda t: t * ((np.log(t) - 1.0) ** 2 + 1.0),
        gamma_exact=_gamma_log2,
    )


def power_profile(beta):
    """phi(e) = e^{-beta}, 0 <= beta < 1."""
    if not 0.0 <= beta < 1.0:
        raise PreconditionError(f"power profile needs 0 <= beta < 1, got {beta}")
    return WeightProfile(
        name=f"pow{beta:g}",
        phi=lambda t: t ** -beta,
        big_phi=lambda t: t ** (1.0 - beta) / (1.0 - beta),
        gamma_exact=lambda k: 2.0 * k * np.exp(betaln(1.0 - beta, 2.0 * k + 1.0)),
        power=beta,
    )


PROFILE_FACTORIES = {
    "one": constant_profile,
    "log2": log_squared_profile,
    "pow0.5": lambda: power_profile(0.5),
    "pow0.9": lambda: power_profile(0.9),
}


def gamma_phi(p, k):
    """
    Gamma_phi(k) by adaptive quadrature on geometrically growing
    subintervals of (0, 1); the first subinterval carries the singularity.
    """
    if k < 1:
        raise PreconditionError(f"k must be >= 1, got {k}")
    two_k = 2.0 * k

    def kernel(eps):
        return np.exp(two_k * np.log1p(-eps)) if eps < 1.0 else 0.0

    edges = [0.0]
    t = 1.0 / (8.0 * k)
    while t < 1.0 and t < 400.0 / k:
        edges.append(t)
        t *= 2.0
    edges.append(min(1.0, 400.0 / k))
    total = 0.0
    for i, (a, b) in enumerate(zip(edges[:-1], edges[1:])):
        if b <= a:
            continue
        if i == 0 and p.power > 0.0:
            value, err = sp_integrate.quad(
                kernel, a, b, weight="alg", wvar=(-p.power, 0.0), epsabs=0.0, epsrel=GAMMA_RTOL, limit=200
            )
        else:
            value, err = sp_integrate.quad(
                lambda e: kernel(e) * float(p.phi(e)), a, b, epsabs=0.0, epsrel=GAMMA_RTOL, limit=200
            )
        if not math.isfinite(value):
            raise IntegrationError(f"Gamma_phi({k}) for '{p.name}' diverges on [{a}, {b}]")
        total += value
    return two_k * total


@dataclass(frozen=True)
class SandwichResult:
    ok: bool
    lower: float
    value: float
    upper: float

    @property
    def lower_margin(self):
        return self.value - self.lower

    @property
    def upper_margin(self):
        return self.upper - self.value


def _assert_decreasing(p, samples=257):
    t = np.geomspace(1e-12, 1.0 - 1e-12, samples)
    values = p.phi(t)
    if np.any(np.diff(values) > 1e-12 * np.maximum(np.abs(values[:-1]), 1.0)):
        raise ContractError(f"profile '{p.name}' is not decreasing on (0, 1)")


def gamma_sandwich_check(p, k, value=None):
    """Check the two-sided Gamma_phi bound at k; value defaults to gamma_phi(p, k)."""
    _assert_decreasing(p)
    phi_k = float(p.phi(min(1.0 / k, 1.0)))
    lower = phi_k / 32.0 + 0.5 * k * float(p.Phi(0.5 / k))
    upper = 2.0 * k * float(p.Phi(1.0 / k)) + phi_k
    if value is None:
        value = gamma_phi(p, k)
    return SandwichResult(ok=lower <= value <= upper, lower=lower, value=float(value), upper=upper)


# =============================================================================
# MAIN THEOREM
# =============================================================================

@dataclass(frozen=True)
class MainTheoremSides:
    lhs: float
    rhs59: float
    rhs60: float
    tail: float = 0.0

    @property
    def ratio59(self):
        return self.lhs / self.rhs59 if self.rhs59 > 0 else (0.0 if self.lhs == 0 else math.inf)

    @property
    def ratio60(self):
        return self.lhs / self.rhs60 if self.rhs60 > 0 else (0.0 if self.lhs == 0 else math.inf)


def main_theorem_sides(f, N, weight=None, basis=None):
    """
    lhs = sum_{k>=1} log^2(e+k) f_k^2 under the sech weight and MP(1)
    (head up to N plus the tail bracket), rhs59 = int log^2(e+|x|) f^2 +
    int f'^2, rhs60 = int log^2(e+|x|) f'^2.
    """
    if f.deriv is None:
        raise UnsupportedCapabilityError(f"'{f.name}' has no derivative")
    w = weight or measures.sech()
    basis = basis or orthopoly.mp_recurrence(1, max(2 * N, 2))
    e = expand(f, basis, N)
    tail = tail_bracket(e, seq_log2)
    lhs = weighted_sum(e, seq_log2) + tail

    def log2w(x):
        return np.log(math.e + np.abs(x)) ** 2

    kinks = tuple(f.kinks)
    f_sq = float(np.real(measures.integrate_against(w, lambda x: log2w(x) * f(x) ** 2, kinks)))
    d_sq = float(np.real(measures.integrate_against(w, lambda x: f.derivative(x) ** 2, kinks)))
    d_sq_log = float(
        np.real(measures.integrate_against(w, lambda x: log2w(x) * f.derivative(x) ** 2, kinks))
    )
    return MainTheoremSides(lhs=lhs, rhs59=f_sq + d_sq, rhs60=d_sq_log, tail=tail)


# =============================================================================
# MEASURE TRANSFER
# =============================================================================

def _mu_profile(x):
    return np.exp(-np.abs(x))


def _nu_profile(x):
    return np.exp(-measures.log_cosh(x) - measures.LOG2)


def stieltjes_tails(f, n_grid, weight_fns=(_mu_profile, _nu_profile), extent=STIELTJES_EXTENT):
    """
    E_n(f) under each weight profile by Lanczos (discretised Stieltjes) with
    full reorthogonalisation on a shared composite Gauss-Legendre node set.

    Returns:
        tuple: (array of tails, one row per weight; ||f||^2 per weight)
    """
    n_grid = sorted(n_grid)
    n_max = n_grid[-1]
    x, wx = panel_rule(
        -extent, extent, STIELTJES_PANEL_WIDTH, STIELTJES_PANEL_ORDER, tuple(f.kinks) + (0.0,)
    )
    fx = _checked(f(x), f.name)
    tails = np.zeros((len(weight_fns), len(n_grid)))
    norms = np.zeros(len(weight_fns))
    for row, wfn in enumerate(weight_fns):
        s = np.sqrt(wx * wfn(x))
        q = np.zeros((n_max + 1, x.size))
        q[0] = s / np.linalg.norm(s)
        r = s * fx
        norms[row] = float(r @ r)
        r = r - (r @ q[0]) * q[0]
        col = 0
        for k in range(n_max + 1):
            if k > 0:
                v = x * q[k - 1]
                for _ in range(2):
                    v -= q[:k].T @ (q[:k] @ v)
                beta = np.linalg.norm(v)
                if beta == 0.0:
                    raise NumericError("Lanczos breakdown", {"k": k, "function": f.name})
                q[k] = v / beta
                r = r - (r @ q[k]) * q[k]
            while col < len(n_grid) and n_grid[col] == k:
                tails[row, col] = float(r @ r)
                col += 1
    return tails, norms


@dataclass(frozen=True)
class TransferCheck:
    ok: bool
    n_grid: tuple
    tail_mu: np.ndarray = field(repr=False)
    tail_nu: np.ndarray = field(repr=False)

    @property
    def ratios(self):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.tail_nu > 0, self.tail_mu / self.tail_nu, 1.0)


def measure_transfer_check(f, n, c=TRANSFER_C, big_c=TRANSFER_BIG_C):
    """
    c * Tail_nu(n) <= Tail_mu(n) <= C * Tail_nu(n) for every n in n (int or
    sequence), with an absolute floor of 1e-12 ||f||^2.
    """
    n_grid = tuple(sorted(n)) if np.ndim(n) else (int(n),)
    tails, norms = stieltjes_tails(f, n_grid)
    tol = 1e-12 * float(np.max(norms))
    mu, nu = tails[0], tails[1]
    ok = bool(np.all(c * nu <= mu + tol) and np.all(mu <= big_c * nu + tol))
    return TransferCheck(ok=ok, n_grid=n_grid, tail_mu=mu, tail_nu=nu)

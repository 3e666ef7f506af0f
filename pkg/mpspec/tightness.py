"""
Gaussian family F_lambda, the convex weight tau and the divergence experiment.

F_lambda(x) = e^{-lambda^2 x^2 / 2} / sqrt(lambda) has a strip difference
that grows like e^{lambda^2 / 2}; its MP(1) coefficients spread over
k up to about e^{lambda^2}, so head sums are reported together with the
tail bracket seq(N+1) * (||F||^2 - sum_{k<=N} f_k^2).
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from config.settings import (
    DIVERGENCE_RTOL,
    EN_MIN_BOUND,
    EN_TABLE,
    LAMBDA_MAX,
    TAIL_RTOL,
    TAU_K_MAX,
    TAU_X_MAX,
    TIGHTNESS_N,
    WORKERS,
)
from mpspec import orthopoly, spectral, strip
from mpspec.errors import ContractError, DomainError, PreconditionError, ResolutionError
from mpspec.functions import StripFunction
from mpspec.quadrature import fourier, integrate_line
from utils.helpers import refine_on

logger = logging.getLogger(__name__)

SQRT_2PI = math.sqrt(2.0 * math.pi)


# =============================================================================
# GAUSSIAN FAMILY
# =============================================================================

def flambda(lam):
    """F_lambda as a StripFunction with derivative and strip evaluator."""
    if lam < 1.0:
        raise DomainError(f"lambda must be >= 1, got {lam}")
    l2 = lam * lam
    c = 1.0 / math.sqrt(lam)
    return StripFunction(
        name=f"F_{lam:g}",
        real_eval=lambda x: c * np.exp(-0.5 * l2 * x * x),
        strip_eval=lambda z: c * np.exp(-0.5 * l2 * z * z),
        deriv=lambda x: -c * l2 * x * np.exp(-0.5 * l2 * x * x),
        growth_alpha=0.0,
    )


def flambda_delta_closed(lam, x):
    """Delta_{F_lambda}(x) = -2i e^{-lambda^2 (x^2 - 1)/2} sin(lambda^2 x) / sqrt(lambda)."""
    x = np.asarray(x, dtype=float)
    l2 = lam * lam
    return -2j * np.exp(-0.5 * l2 * (x * x - 1.0)) * np.sin(l2 * x) / math.sqrt(lam)


def flambda_delta_hat(lam, v):
    """
    Fourier transform of Delta_{F_lambda}: shifting the contour by +-i
    multiplies the transform of F_lambda by e^{+-v}, so the result is
    2 sinh(v) * sqrt(2 pi) lambda^{-3/2} e^{-v^2 / 2 lambda^2}.
    """
    v = np.asarray(v, dtype=float)
    return 2.0 * SQRT_2PI * lam ** -1.5 * np.exp(-0.5 * v * v / (lam * lam)) * np.sinh(v)


def flambda_delta_hat_numeric(lam, v):
    """Panel quadrature of int Delta_{F_lambda}(x) e^{ixv} dx."""
    f = flambda(lam)
    extent = 12.0 / lam + 2.0
    return fourier(lambda x: strip.delta(f, x), v, extent)


def flambda_energy_budget(lam):
    """
    int (F_lambda')^2 log^2(e+|x|) e^{-|x|} dx against sqrt(2 pi).

    Returns:
        tuple: (value, bound)
    """
    f = flambda(lam)
    value, _ = integrate_line(
        lambda x: f.derivative(x) ** 2 * np.log(math.e + np.abs(x)) ** 2 * np.exp(-np.abs(x)),
        breakpoints=(0.0,),
    )
    return float(np.real(value)), SQRT_2PI


def _expand_flambda(lam, N):
    basis = orthopoly.mp_recurrence(1, max(N, 1))
    return spectral.expand(flambda(lam), basis, N)


@refine_on(ResolutionError, "N", factor=2, max_attempts=4)
def flambda_weighted_energy(lam, seq, N=TIGHTNESS_N, rtol=TAIL_RTOL):
    """
    sum_{k>=1} seq(k) (F_lambda)_k^2 for a nondecreasing seq; raises
    ResolutionError when the tail bracket exceeds rtol times the head.
    N doubles up to three times before giving up.
    """
    e = _expand_flambda(lam, N)
    head = spectral.weighted_sum(e, seq)
    bracket = spectral.tail_bracket(e, seq)
    if bracket > rtol * head:
        raise ResolutionError(
            f"tail bracket {bracket:.3e} exceeds {rtol:g} of the head {head:.6g} at N={N}",
            suggested_n=2 * N,
        )
    return head + bracket


# =============================================================================
# TAU CONSTRUCTION
# =============================================================================

@dataclass(frozen=True)
class TauFunction:
    """Convex piecewise-linear tau: slope i on [x_i, x_{i+1}), tau(0) = 0."""

    breakpoints: np.ndarray = field(repr=False)
    slopes: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def _segment(self, x):
        return np.clip(np.searchsorted(self.breakpoints, x, side="right") - 1, 0, None)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        i = self._segment(x)
        return self.values[i] + self.slopes[i] * (x - self.breakpoints[i])

    def derivative(self, x):
        return self.slopes[self._segment(np.asarray(x, dtype=float))]

    @property
    def levels(self):
        return len(self.slopes)


def build_tau(a, k_max=TAU_K_MAX):
    """
    Breakpoints x_1 = 0 and x_{i+1} = max(16 (i+1)^2, log^2(e + k_{i+1}),
    x_i + 1) with k_i = min{k : a_k >= i}; the last slope continues to
    infinity.
    """
    k = np.arange(int(k_max) + 1)
    values = np.asarray(a(k), dtype=float)
    if np.any(values < 1.0) or np.any(np.diff(values) < 0.0):
        raise PreconditionError("a_k must be >= 1 and nondecreasing")
    top = int(math.floor(values[-1]))
    if top < 2:
        raise ContractError(f"a_k stays below 2 for k <= {k_max}; the sequence must diverge")
    level_k = np.searchsorted(values, np.arange(1, top + 1), side="left")
    xs = [0.0]
    for i in range(1, top):
        xs.append(max(16.0 * (i + 1) ** 2, math.log(math.e + level_k[i]) ** 2, xs[-1] + 1.0))
    xs = np.array(xs)
    slopes = np.arange(1, len(xs) + 1, dtype=float)
    vals = np.concatenate([[0.0], np.cumsum(slopes[:-1] * np.diff(xs))])
    logger.debug("build_tau: %d levels, last breakpoint %g", len(xs), xs[-1])
    return TauFunction(breakpoints=xs, slopes=slopes, values=vals)


def tau_invariants(tau, a, k_max=TAU_K_MAX, x_max=TAU_X_MAX, points=4001):
    """Evaluate the four tau properties on a grid; returns a name -> bool mapping."""
    x = np.unique(np.concatenate([np.geomspace(1e-3, x_max, points), tau.breakpoints[tau.breakpoints > 0]]))
    t = tau(x)
    k = np.arange(1, int(k_max) + 1)
    y = np.log(math.e + k) ** 2
    big = x > 16.0
    return {
        "convex": bool(np.all(np.diff(tau.slopes) >= 0.0)),
        "tau_zero": float(tau(0.0)) == 0.0,
        "quadratic_growth": bool(np.all(t <= 1.0 + x * x)),
        "sequence_domination": bool(np.all(tau(y) <= np.asarray(a(k), float) * y * (1.0 + 1e-12))),
        "log_derivative": bool(np.all(tau.derivative(x[big]) / t[big] <= 0.25 / np.sqrt(x[big]))),
    }


# =============================================================================
# DIVERGENCE EXPERIMENT
# =============================================================================

def a_constant(k):
    return np.ones_like(np.asarray(k, dtype=float))


def a_loglog(k):
    return np.log(np.log(math.exp(math.e) + np.asarray(k, dtype=float)))


@dataclass(frozen=True)
class ExperimentRow:
    """
    One lambda of the divergence experiment.

    The weighted sum is bracketed: weighted_sum adds the lower tail bound
    seq(N+1) * residual, weighted_upper adds seq(N+1)/(N+1) times the k-tail
    left over by the strip identity. A row is resolved when the upper tail
    bound is within rtol of the head.
    """

    lam: float
    weighted_sum: float
    k_energy: float
    tail_bracket: float
    en: Dict[int, float]
    min_products: Dict[int, float]
    head: float = 0.0
    tail_upper: float = 0.0
    residual: float = 0.0
    resolved: bool = True

    @property
    def weighted_upper(self):
        return self.head + self.tail_upper


@dataclass(frozen=True)
class DivergenceReport:
    rows: Tuple[ExperimentRow, ...]
    N: int

    @property
    def resolved(self):
        return all(r.resolved for r in self.rows)

    @property
    def unresolved_lambdas(self):
        return [r.lam for r in self.rows if not r.resolved]

    @property
    def increasing(self):
        """Each lower bound exceeds the previous upper bound."""
        return all(b.weighted_sum > a.weighted_upper for a, b in zip(self.rows, self.rows[1:]))

    @property
    def en_bound(self):
        return max(max(r.min_products.values()) for r in self.rows)

    @property
    def en_bounded(self):
        return self.en_bound <= EN_MIN_BOUND

    @property
    def slope(self):
        """Least-squares slope of log(sum k f_k^2) against lambda^2."""
        lam2 = np.array([r.lam ** 2 for r in self.rows])
        y = np.log([r.k_energy for r in self.rows])
        return float(np.polyfit(lam2, y, 1)[0])

    @property
    def growth_ratio(self):
        """Lower bound on the last weighted sum over the first."""
        return self.rows[-1].weighted_sum / self.rows[0].weighted_upper

    @property
    def spread(self):
        """Upper bound on max/min of the weighted sums."""
        return max(r.weighted_upper for r in self.rows) / min(r.weighted_sum for r in self.rows)


def _row(lam, a, N, n_table, rtol):
    e = _expand_flambda(lam, N)

    def seq(k):
        return np.asarray(a(k), float) * spectral.seq_log2(k)

    head = spectral.weighted_sum(e, seq)
    bracket = spectral.tail_bracket(e, seq)
    k_energy = strip.identity_rhs(flambda(lam))
    # seq(k)/k is nonincreasing past N, so the k-tail bounds the seq-tail
    k_tail = max(k_energy - spectral.weighted_sum(e, spectral.seq_k), 0.0)
    ratio = float(seq(np.array([N + 1.0]))[0]) / (N + 1)
    tail_upper = max(ratio * k_tail, bracket)
    resolved = tail_upper <= rtol * head

    en = {n: spectral.tail_error(e, n) for n in n_table}
    scale = math.exp(lam * lam)
    products = {n: en[n] * min(n / scale, lam * lam) for n in n_table}
    logger.info(
        "divergence row lambda=%g: weighted in [%.6g, %.6g] k_energy=%.6g%s",
        lam, head + bracket, head + tail_upper, k_energy, "" if resolved else " (unresolved)",
    )
    return ExperimentRow(
        lam=lam,
        weighted_sum=head + bracket,
        k_energy=k_energy,
        tail_bracket=bracket,
        en=en,
        min_products=products,
        head=head,
        tail_upper=tail_upper,
        residual=e.residual,
        resolved=resolved,
    )


def divergence_experiment(a, lam_grid, N, n_table=EN_TABLE, workers=WORKERS, rtol=DIVERGENCE_RTOL):
    """Rows (lambda, weighted sum bracket, k-energy, E_n table) ordered by lambda."""
    lam_grid = [float(x) for x in lam_grid]
    if not lam_grid or any(b <= c for c, b in zip(lam_grid, lam_grid[1:])):
        raise PreconditionError("lambda grid must be nonempty and increasing")
    if lam_grid[0] < 1.0 or lam_grid[-1] > LAMBDA_MAX:
        raise PreconditionError(f"lambda grid must lie within [1, {LAMBDA_MAX}]")
    if N <= max(n_table):
        raise PreconditionError(f"N={N} must exceed the largest E_n degree {max(n_table)}")
    with ThreadPoolExecutor(max_workers=max(workers, 1)) as pool:
        rows = list(pool.map(lambda lam: _row(lam, a, N, n_table, rtol), lam_grid))
    return DivergenceReport(rows=tuple(rows), N=N)

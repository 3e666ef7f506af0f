"""
Product-measure expansions and rate comparisons.

Multivariate coefficients f_alpha = <f, P_alpha1 x ... x P_alphad> under
nu^{(x) d} are computed by tensor quadrature: one projection matrix per axis
(N+1 rows, one column per node) applied along each axis of the sampled grid.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Tuple

import numpy as np

from config.settings import (
    DEFAULT_SEED,
    RATE_SPREAD,
    TENSOR_EXTENT,
    TENSOR_MAX_DIM,
    TENSOR_MAX_N,
    TENSOR_MAX_POINTS,
    TENSOR_PANEL_ORDER,
    TENSOR_PANEL_WIDTH,
)
from mpspec import functions, measures, orthopoly, spectral
from mpspec.errors import (
    ContractError,
    DomainError,
    IntegrationError,
    PreconditionError,
    ResourceError,
    UnsupportedCapabilityError,
)
from mpspec.quadrature import integrate_line, panel_rule

logger = logging.getLogger(__name__)


# =============================================================================
# MULTI-INDEX EXPANSIONS
# =============================================================================

@dataclass(frozen=True)
class MultiIndexExpansion:
    d: int
    N: int
    coeffs: np.ndarray = field(repr=False)
    norm_sq: float
    method: str
    points: int

    def coefficient(self, alpha):
        return float(self.coeffs[tuple(alpha)])

    def as_dict(self, tol=0.0):
        """Multi-index -> f_alpha for |f_alpha| > tol."""
        return {
            tuple(int(i) for i in idx): float(v)
            for idx, v in np.ndenumerate(self.coeffs)
            if abs(v) > tol
        }

    @property
    def total_degree(self):
        grids = np.meshgrid(*([np.arange(self.N + 1)] * self.d), indexing="ij")
        return sum(grids)

    @property
    def residual(self):
        return max(self.norm_sq - float(np.sum(self.coeffs ** 2)), 0.0)

    def tail_error(self, n):
        """E_n over total degree: sum_{|alpha| > n} f_alpha^2 plus the residual."""
        return float(np.sum(self.coeffs[self.total_degree > n] ** 2)) + self.residual


@dataclass(frozen=True)
class _AxisRule:
    nodes: np.ndarray
    weights: np.ndarray
    projector: np.ndarray
    method: str


@lru_cache(maxsize=8)
def _axis_rule(N, method):
    basis = orthopoly.mp_recurrence(1, max(2 * N, 2))
    if method == "gauss":
        rule = spectral.default_rule(basis, max(2 * N, 2))
        projector = rule.vectors[: N + 1] * rule.vectors[0][None, :]
        return _AxisRule(rule.nodes, rule.weights, projector, method)
    x, wx = panel_rule(-TENSOR_EXTENT, TENSOR_EXTENT, TENSOR_PANEL_WIDTH, TENSOR_PANEL_ORDER)
    wx = wx * measures.sech().density(x)
    q, log_scale = basis.orthonormal_table(x, N)
    projector = q * np.exp(log_scale)[None, :] * wx[None, :]
    return _AxisRule(x, wx, projector, method)


def _apply_axes(values, mats):
    out = values
    for axis, m in enumerate(mats):
        out = np.moveaxis(np.tensordot(m, out, axes=([1], [axis])), 0, axis)
    return out


def _grid(rule, d):
    return np.meshgrid(*([rule.nodes] * d), indexing="ij")


def _check_budget(d, N, points):
    if d > TENSOR_MAX_DIM:
        raise ResourceError(f"dimension {d} exceeds the tensor budget ({TENSOR_MAX_DIM})")
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    if N > TENSOR_MAX_N:
        raise ResourceError(f"per-axis degree {N} exceeds the tensor budget ({TENSOR_MAX_N})")
    if points > TENSOR_MAX_POINTS:
        raise ResourceError(f"{points} tensor nodes exceed the budget ({TENSOR_MAX_POINTS})")


def product_expand(f, d, N, kinks=()):
    """
    Coefficients of f(x_1, ..., x_d) in the MP(1)^{(x) d} basis.

    Smooth f uses the tensor Gauss rule; f with declared kinks uses
    tensor panels aligned to them.
    """
    method = "panels" if kinks else "gauss"
    rule = _axis_rule(N, method)
    _check_budget(d, N, rule.nodes.size ** d)
    values = np.asarray(f(*_grid(rule, d)), dtype=float)
    if not np.all(np.isfinite(values)):
        raise IntegrationError("non-finite values of f on the tensor grid")
    coeffs = _apply_axes(values, [rule.projector] * d)
    weights = _apply_axes(values * values, [rule.weights[None, :]] * d)
    logger.debug("product_expand d=%d N=%d: %d nodes (%s)", d, N, rule.nodes.size ** d, method)
    return MultiIndexExpansion(
        d=d,
        N=N,
        coeffs=coeffs,
        norm_sq=float(weights.ravel()[0]),
        method=method,
        points=rule.nodes.size ** d,
    )


# =============================================================================
# TENSORIZATION
# =============================================================================

def phi_axis_log2(k):
    """log^2(e + k) for k >= 1 and 0 at k = 0."""
    k = np.asarray(k, dtype=float)
    return np.where(k > 0, np.log(math.e + k) ** 2, 0.0)


def w_axis_log2(x):
    return np.log(math.e + np.abs(x)) ** 2


def one_dimensional_suite(seed=DEFAULT_SEED):
    suite = [
        functions.identity(),
        functions.square(),
        functions.abs_clip(1.0),
        functions.abs_clip(2.0),
        functions.abs_clip(3.0),
        functions.gaussian_bump(),
    ]
    return suite + functions.polynomial_suite(seed, 4, 6, min_degree=1)


def one_dimensional_margin(N, suite=None):
    """max lhs/rhs60 of main_theorem_sides over the 1-D suite."""
    suite = suite or one_dimensional_suite()
    ratios = [spectral.main_theorem_sides(f, N).ratio60 for f in suite]
    return max(ratios)


@dataclass(frozen=True)
class TensorizationResult:
    lhs: float
    rhs: float
    margin: float
    ok: bool


def tensorization_check(f, grads, d, N, margin, phi_axis=phi_axis_log2, w_axis=w_axis_log2, kinks=(), rtol=1e-6):
    """
    lhs = sum_alpha phi(alpha) f_alpha^2 with phi(alpha) = sum_i phi_i(alpha_i),
    rhs = int sum_i w_i(x_i) (d_i f)^2 d nu^{(x) d}; ok when lhs <= margin * rhs.
    """
    if grads is None or len(grads) != d:
        raise UnsupportedCapabilityError("tensorization needs one partial derivative per axis")
    e = product_expand(f, d, N, kinks)
    k = np.arange(N + 1)
    phi = sum(
        np.reshape(phi_axis(k), [-1 if i == j else 1 for j in range(d)]) for i in range(d)
    )
    lhs = float(np.sum(phi * e.coeffs ** 2))

    rule = _axis_rule(N, "panels")
    if rule.nodes.size ** d > TENSOR_MAX_POINTS:
        raise ResourceError(f"right-hand side needs {rule.nodes.size ** d} tensor nodes")
    grid = _grid(rule, d)
    integrand = sum(w_axis(grid[i]) * np.asarray(grads[i](*grid), float) ** 2 for i in range(d))
    rhs = float(_apply_axes(integrand, [rule.weights[None, :]] * d).ravel()[0])
    ok = lhs <= margin * rhs * (1.0 + rtol) + 1e-14
    return TensorizationResult(lhs=lhs, rhs=rhs, margin=margin, ok=ok)


def tensor_suite():
    """2-D test functions: (name, f, grads, kinks)."""
    def clip(t):
        return np.minimum(np.abs(t), 2.0)

    def dclip(t):
        return np.where(np.abs(t) < 2.0, np.sign(t), 0.0)

    def bump(x, y):
        return np.exp(-0.5 * (x * x + y * y))

    return [
        ("x+y", lambda x, y: x + y, (lambda x, y: np.ones_like(x), lambda x, y: np.ones_like(y)), ()),
        ("xy", lambda x, y: x * y, (lambda x, y: y, lambda x, y: x), ()),
        ("x2+y2", lambda x, y: x * x + y * y, (lambda x, y: 2 * x, lambda x, y: 2 * y), ()),
        ("clip2_sum", lambda x, y: clip(x) + clip(y),
         (lambda x, y: dclip(x) + 0 * y, lambda x, y: dclip(y) + 0 * x), (-2.0, 0.0, 2.0)),
        ("bump", bump, (lambda x, y: -x * bump(x, y), lambda x, y: -y * bump(x, y)), ()),
    ]


def radial_clip(x, y, cap=5.0):
    return np.minimum(np.hypot(x, y), cap)


# =============================================================================
# RATE COMPARISONS
# =============================================================================

def _laguerre_basis(N):
    return orthopoly.laguerre_recurrence(max(N, 1), 0)


def sobolev_half(f):
    """int_0^inf x f'(x)^2 e^{-x} dx."""
    if f.deriv is None:
        raise UnsupportedCapabilityError(f"'{f.name}' has no derivative")
    try:
        value, _ = integrate_line(
            lambda x: x * f.derivative(x) ** 2 * np.exp(-x),
            breakpoints=tuple(f.kinks),
            half_line=True,
        )
    except IntegrationError as exc:
        raise ContractError(f"int x f'^2 e^-x of '{f.name}' diverges: {exc}") from exc
    return float(np.real(value))


@dataclass(frozen=True)
class LaguerreRow:
    n: int
    en: float
    bound: float
    ratio: float


@dataclass(frozen=True)
class LaguerreRateReport:
    rows: Tuple[LaguerreRow, ...]
    sobolev: float

    @property
    def ok(self):
        return all(r.ratio <= 1.0 + 1e-8 for r in self.rows)


def laguerre_rate_check(f, n_grid):
    """E_n(f, mu~_1) against int x f'^2 d mu~_1 / (n + 1)."""
    n_grid = sorted(int(n) for n in n_grid)
    if not n_grid or n_grid[0] < 0:
        raise PreconditionError("n grid must be nonempty and nonnegative")
    sob = sobolev_half(f)
    N = n_grid[-1] + 1
    e = spectral.expand(f, _laguerre_basis(N), N)
    rows = []
    for n in n_grid:
        en = spectral.tail_error(e, n)
        bound = sob / (n + 1)
        ratio = en / bound if bound > 0 else (0.0 if en <= 1e-14 * max(e.norm_sq, 1.0) else math.inf)
        rows.append(LaguerreRow(n=n, en=en, bound=bound, ratio=ratio))
    return LaguerreRateReport(rows=tuple(rows), sobolev=sob)


@dataclass(frozen=True)
class RateRow:
    n: int
    en_two_sided: float
    en_times_log2n: float
    en_half: float
    en_times_n: float


@dataclass(frozen=True)
class RateComparison:
    rows: Tuple[RateRow, ...]
    sobolev: float
    norm_sq: float

    def _bounded(self, column):
        values = np.array([getattr(r, column) for r in self.rows])
        floor = 1e-12 * max(self.norm_sq, 1.0)
        return bool(np.max(values) <= RATE_SPREAD * np.median(values) + floor)

    @property
    def two_sided_bounded(self):
        return self._bounded("en_times_log2n")

    @property
    def half_sided_bounded(self):
        return all(r.en_times_n <= self.sobolev * (1.0 + 1e-8) + 1e-14 for r in self.rows)

    @property
    def spread(self):
        values = np.array([r.en_times_log2n for r in self.rows])
        med = float(np.median(values))
        return float(np.max(values)) / med if med > 0 else 0.0


def rate_comparison(f_two, f_half, n_grid):
    """Side-by-side E_n log^2 n (two-sided, nu) and E_n (n+1) (half-sided, mu~_1)."""
    n_grid = sorted(int(n) for n in n_grid)
    if not n_grid or n_grid[0] < 1:
        raise PreconditionError("n grid must be nonempty and start at n >= 1")
    N = n_grid[-1] + 1
    two = spectral.expand(f_two, orthopoly.mp_recurrence(1, max(2 * N, 2)), N)
    half = spectral.expand(f_half, _laguerre_basis(N), N)
    sob = sobolev_half(f_half)
    rows = []
    for n in n_grid:
        en2 = spectral.tail_error(two, n)
        enh = spectral.tail_error(half, n)
        rows.append(RateRow(n, en2, en2 * math.log(n) ** 2, enh, enh * (n + 1)))
    return RateComparison(rows=tuple(rows), sobolev=sob, norm_sq=two.norm_sq)


def lipschitz_corollary(N, n_grid, cap=5.0):
    """
    Total-degree E_n of min(|(x, y)|, cap) under nu (x) nu with the
    normalised column E_n log^2 n; returns (rows, bounded).
    """
    e = product_expand(lambda x, y: radial_clip(x, y, cap), 2, N, kinks=(0.0,))
    rows = [(n, e.tail_error(n), e.tail_error(n) * math.log(n) ** 2) for n in sorted(n_grid)]
    column = np.array([r[2] for r in rows])
    bounded = bool(np.max(column) <= RATE_SPREAD * np.median(column) + 1e-12 * e.norm_sq)
    return rows, bounded

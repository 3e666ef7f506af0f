"""
Hyperbolic inequality checks and Poincare-constant estimates.

The Poincare constant C_P(w) is estimated as 1 / lambda_1, where lambda_1 is
the smallest nonzero eigenvalue of the finite-difference Dirichlet form
int (f')^2 dw against the mass form int f^2 dw on a truncated grid.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, eigvalsh_tridiagonal

from config.settings import (
    HYPERBOLIC_GRID_POINTS,
    HYPERBOLIC_GRID_RANGE,
    DISK_RADII,
    POINCARE_EXTENT,
    POINCARE_POINTS,
    POINCARE_REFINE_RTOL,
    POINCARE_SCALING_RTOL,
    WORKERS,
)
from mpspec import measures, strip
from mpspec.errors import DomainError, NumericError, PreconditionError

logger = logging.getLogger(__name__)

CHECK_ATOL = 1e-14
SERIES_CUTOFF = 1e-6


# =============================================================================
# HYPERBOLIC INEQUALITIES
# =============================================================================

@dataclass(frozen=True)
class CheckRow:
    """One pointwise inequality: the smallest slack over the grid and where it occurs."""

    name: str
    worst_point: float
    margin: float
    passed: bool


def half_tanh_ratio(alpha):
    """(cosh a - 1) / (a sinh a) = tanh(a/2) / a, with limit 1/2 at a = 0."""
    a = np.abs(np.asarray(alpha, dtype=float))
    small = a < SERIES_CUTOFF
    safe = np.where(small, 1.0, a)
    return np.where(small, 0.5 - a * a / 24.0, np.tanh(0.5 * safe) / safe)


def cosh_square_ratio(x):
    """(cosh x - 1) / (x^2 cosh x), with limit 1/2 at x = 0."""
    x = np.abs(np.asarray(x, dtype=float))
    small = x < SERIES_CUTOFF
    safe = np.where(small, 1.0, x)
    return np.where(small, 0.5, 2.0 * np.sinh(0.5 * safe) ** 2 / (safe * safe * np.cosh(safe)))


def iota(eps):
    """1 / C_{1-eps} = eps (2 - eps) / (2 - 2 eps + eps^2)."""
    eps = np.asarray(eps, dtype=float)
    return eps * (2.0 - eps) / (2.0 - 2.0 * eps + eps * eps)


def _row(name, points, slack):
    i = int(np.argmin(slack))
    margin = float(slack[i])
    return CheckRow(name=name, worst_point=float(points[i]), margin=margin, passed=bool(margin >= -CHECK_ATOL))


def _default_grid(points=HYPERBOLIC_GRID_POINTS, extent=HYPERBOLIC_GRID_RANGE):
    return np.linspace(-extent, extent, points)


def hyperbolic_checks(grid=None):
    """
    Evaluate the hyperbolic and trigonometric helper inequalities.

    Args:
        grid: Points for the two-sided hyperbolic bounds (default 10^4
              points on [-50, 50]); the trigonometric and disk checks use
              grids of the same size on their own ranges

    Returns:
        list: CheckRow per inequality, in a fixed order
    """
    alpha = _default_grid() if grid is None else np.asarray(grid, dtype=float)
    if alpha.size == 0 or not np.all(np.isfinite(alpha)):
        raise PreconditionError("grid must be a nonempty array of finite points")
    n = alpha.size
    rows = []

    g = half_tanh_ratio(alpha)
    rows.append(_row("tanh_ratio_lower", alpha, g - 0.5 / (1.0 + np.abs(alpha))))
    rows.append(_row("tanh_ratio_upper", alpha, 0.5 - g))
    rows.append(_row("cosh_square", alpha, 2.0 / (1.0 + alpha * alpha) - cosh_square_ratio(alpha)))

    u = np.linspace(-strip.QUARTER_PI, strip.QUARTER_PI, n)
    rows.append(_row("cos_linear", u, np.cos(2.0 * u) - (1.0 - 4.0 * np.abs(u) / math.pi)))

    x = np.linspace(0.0, strip.HALF_PI, n)
    rows.append(_row("sin_jordan", x, np.sin(x) - 2.0 * x / math.pi))

    eps = np.linspace(0.0, 1.0, n + 2)[1:-1]
    value = iota(eps)
    rows.append(_row("iota_lower", eps, value - eps))
    rows.append(_row("iota_upper", eps, 2.0 * eps - value))

    radius = np.vectorize(strip.disk_image_radius, otypes=[float])
    for r in DISK_RADII:
        geom = strip.DiskGeometry(r)
        theta = np.linspace(-geom.half_width, geom.half_width, n)
        c2 = geom.C * np.cos(2.0 * theta)
        big_r = radius(theta, r)
        rows.append(_row(f"disk_radius_lower_r{r:g}", theta, big_r - c2))
        rows.append(_row(f"disk_radius_upper_r{r:g}", theta, 2.0 * c2 - big_r))

    failed = [row.name for row in rows if not row.passed]
    if failed:
        logger.warning("hyperbolic checks failed: %s", ", ".join(failed))
    return rows


# =============================================================================
# POINCARE CONSTANT
# =============================================================================

@dataclass(frozen=True)
class PoincareEstimate:
    weight_name: str
    extent: Tuple[float, float]
    points: int
    estimate: float
    refined: Optional[float]
    converged: bool

    @property
    def change(self):
        if self.refined is None:
            return math.nan
        return abs(self.estimate - self.refined) / self.refined


def _grid_for(w, X, M):
    """Grid on the support of w truncated to [-X, X] in units of the weight's scale."""
    half = X / w.scale
    lo = max(w.support[0], -half)
    hi = min(w.support[1], half)
    if not hi > lo:
        raise DomainError(f"empty Poincare grid for {w.name}")
    return np.linspace(lo, hi, M)


def _spectral_gap(w, X, M):
    """Smallest nonzero eigenvalue of the symmetrized tridiagonal Dirichlet form."""
    x = _grid_for(w, X, M)
    h = x[1] - x[0]
    log_rho = w.log_density(x)
    log_mid = w.log_density(0.5 * (x[:-1] + x[1:]))
    if not (np.all(np.isfinite(log_rho)) and np.all(np.isfinite(log_mid))):
        raise NumericError(
            f"log-density of {w.name} is not finite on the Poincare grid",
            diagnostics={"extent": (float(x[0]), float(x[-1]))},
        )

    inv_h2 = 1.0 / (h * h)
    diag = np.zeros(M)
    diag[:-1] += np.exp(log_mid - log_rho[:-1])
    diag[1:] += np.exp(log_mid - log_rho[1:])
    diag *= inv_h2
    off = -np.exp(log_mid - 0.5 * (log_rho[:-1] + log_rho[1:])) * inv_h2

    try:
        values = eigvalsh_tridiagonal(diag, off, select="i", select_range=(0, 1), lapack_driver="stebz")
    except LinAlgError as exc:
        raise NumericError(f"tridiagonal eigensolve failed for {w.name}: {exc}") from exc
    lam0, lam1 = float(values[0]), float(values[1])
    if abs(lam0) > 1e-6 * lam1:
        logger.warning("%s: ground eigenvalue %.3e is not close to zero", w.name, lam0)
    if not lam1 > 0.0:
        raise NumericError(f"nonpositive spectral gap {lam1} for {w.name}")
    return lam1, (float(x[0]), float(x[-1]))


def poincare_estimate(w, X=POINCARE_EXTENT, M=POINCARE_POINTS, refine=True, workers=WORKERS):
    """
    Estimate C_P(w) = 1 / lambda_1 on M points and, when refine is set, on
    2M - 1 points; converged records a relative change of at most 2%.
    """
    if X <= 0 or M < 3:
        raise PreconditionError(f"need X > 0 and M >= 3, got X={X}, M={M}")
    sizes = [M, 2 * M - 1] if refine else [M]
    with ThreadPoolExecutor(max_workers=max(workers, 1)) as pool:
        results = list(pool.map(lambda m: _spectral_gap(w, X, m), sizes))

    estimate = 1.0 / results[0][0]
    refined = 1.0 / results[1][0] if refine else None
    converged = True
    if refine:
        converged = abs(estimate - refined) <= POINCARE_REFINE_RTOL * refined
        if not converged:
            logger.warning("%s: Poincare estimate moved from %.6g to %.6g under refinement", w.name, estimate, refined)
    logger.info("C_P(%s) ~ %.10g on %d points", w.name, estimate, M)
    return PoincareEstimate(
        weight_name=w.name,
        extent=results[0][1],
        points=M,
        estimate=estimate,
        refined=refined,
        converged=converged,
    )


@dataclass(frozen=True)
class ScalingCheck:
    lam: float
    base: float
    dilated: float

    @property
    def ratio(self):
        return self.dilated * self.lam ** 2 / self.base

    @property
    def ok(self):
        return abs(self.ratio - 1.0) <= POINCARE_SCALING_RTOL


def poincare_scaling_check(w, lams=(0.5, 2.0), X=POINCARE_EXTENT, M=POINCARE_POINTS):
    """C_P(dilate(w, lam)) * lam^2 against C_P(w)."""
    base = poincare_estimate(w, X, M, refine=False).estimate
    return [
        ScalingCheck(lam=lam, base=base, dilated=poincare_estimate(measures.dilate(w, lam), X, M, refine=False).estimate)
        for lam in lams
    ]


def perturbation_bound(c_p):
    """4 C (1 + log+(4C/e) / 2)^2."""
    log_plus = max(math.log(4.0 * c_p / math.e), 0.0)
    return 4.0 * c_p * (1.0 + 0.5 * log_plus) ** 2


@dataclass(frozen=True)
class PerturbationCheck:
    base: PoincareEstimate
    perturbed: PoincareEstimate
    bound: float
    dilation: Optional[float]
    dilated_constant: Optional[float]

    @property
    def lhs(self):
        return self.perturbed.estimate

    @property
    def slack(self):
        return self.bound - self.lhs

    @property
    def ok(self):
        return self.lhs <= self.bound and self.base.converged and self.perturbed.converged


def poincare_perturbation_check(w=None, X=POINCARE_EXTENT, M=POINCARE_POINTS):
    """
    Compare C_P of the log^2(e+|x|)-perturbed weight with the bound built
    from the estimated C_P(w). When C_P(w) > e/4 the weight is first
    dilated by 2 sqrt(C_P/e), which brings its constant down to e/4.
    """
    w = w or measures.sech()
    base = poincare_estimate(w, X, M)
    perturbed = poincare_estimate(measures.log_perturbed(w), X, M)
    bound = perturbation_bound(base.estimate)

    dilation = None
    dilated_constant = None
    if base.estimate > math.e / 4.0:
        dilation = 2.0 * math.sqrt(base.estimate / math.e)
        dilated_constant = poincare_estimate(measures.dilate(w, dilation), X, M, refine=False).estimate
        logger.debug("dilation branch: lambda=%.6g, C_P=%.6g against e/4", dilation, dilated_constant)

    check = PerturbationCheck(
        base=base,
        perturbed=perturbed,
        bound=bound,
        dilation=dilation,
        dilated_constant=dilated_constant,
    )
    logger.info("perturbation: C_P=%.6g <= %.6g (%s)", check.lhs, bound, "ok" if check.ok else "FAILED")
    return check

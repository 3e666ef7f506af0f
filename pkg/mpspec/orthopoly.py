r"""
Orthogonal families: Meixner-Pollaczek P_k^{(l)} and (generalised) Laguerre.

## Meixner-Pollaczek

The family is defined by the generating function

$$
    G_l(x, s) = e^{x \arctan s} (1 + s^2)^{-l/2} = \sum_k P_k^{(l)}(x) s^k .
$$

Differentiating in s gives $(1+s^2) G_s = (x - l s) G$, hence

$$
    (k+1) P_{k+1} = x P_k - (k - 1 + l) P_{k-1},
$$

with $\|P_k\|^2 = \binom{k+l-1}{k}$ in $L^2(\nu_l)$. The orthonormal Jacobi
matrix has zero diagonal and off-diagonal $b_k = \sqrt{k (k + l - 1)}$.

## Laguerre

For the weight $x^\alpha e^{-x} / \Gamma(\alpha+1)$:
$(k+1) L_{k+1} = (2k + 1 + \alpha - x) L_k - (k + \alpha) L_{k-1}$, diagonal
$a_k = 2k + 1 + \alpha$, off-diagonal $b_k = -\sqrt{k (k + \alpha)}$ (the sign
keeps $L_k$'s own sign convention).

Gauss rules use Sturm-sequence bisection (LAPACK stebz) for the nodes. The
eigenvector columns are then rebuilt from the forward recurrence at each
node and normalised, which keeps tiny weights accurate to full relative
precision.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Tuple

import mpmath
import numpy as np
from scipy.linalg import LinAlgError, eigvalsh_tridiagonal
from scipy.special import gammaln

from config.settings import EVAL_DPS, GRAM_EXTENT, MAX_DEGREE_CAP, MAX_EXACT_DEGREE, RESCALE_THRESHOLD
from mpspec import measures
from mpspec.errors import DomainError, NumericError, PreconditionError, ResourceError
from mpspec.quadrature import panel_rule

logger = logging.getLogger(__name__)

LOG_RESCALE = math.log(RESCALE_THRESHOLD)


class Family(str, Enum):
    MP = "mp"
    LAGUERRE = "laguerre"


@dataclass(frozen=True)
class PolyExact:
    """Polynomial with exact rational coefficients in the monomial basis."""

    coeffs: Tuple[Fraction, ...]

    def __post_init__(self):
        if not self.coeffs or self.coeffs[-1] == 0:
            raise DomainError("leading coefficient must be nonzero")

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def leading(self):
        return self.coeffs[-1]

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def to_float(self):
        return np.array([float(c) for c in self.coeffs])


def _poly_trim(p):
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _poly_add(p, q):
    n = max(len(p), len(q))
    return [(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)]


def _poly_scale(p, c):
    return [c * a for a in p]


def _poly_shift(p):
    """Multiply by x."""
    return [Fraction(0)] + list(p)


@dataclass(frozen=True)
class OrthoBasis:
    """Recurrence table and norms of an orthogonal family up to degree_cap."""

    family: Family
    param: float
    degree_cap: int
    alpha: np.ndarray = field(repr=False)
    beta: np.ndarray = field(repr=False)
    norms_sq: np.ndarray = field(repr=False)
    rational: Tuple[Tuple[Fraction, Fraction, Fraction], ...] = field(repr=False, compare=False)
    mass: float = 1.0

    @property
    def recurrence(self):
        """Pairs (a_k, b_k) of the orthonormal Jacobi matrix; b_0 is 0."""
        return list(zip(self.alpha.tolist(), self.beta.tolist()))

    @property
    def name(self):
        if self.family == Family.MP:
            return f"MP({int(self.param)})"
        return f"Laguerre({self.param:g})"

    def weight(self):
        if self.family == Family.MP:
            return measures.nu_ell(int(self.param))
        if self.param == 0:
            return measures.half_exp()
        a = float(self.param)
        return measures.custom(
            f"laguerre{a:g}",
            log_density=lambda x: a * np.log(np.maximum(x, 1e-300)) - x - gammaln(a + 1.0),
            support=(0.0, math.inf),
        )

    def exact_polys(self, k_max):
        """P_0..P_{k_max} exactly, from the rational recurrence."""
        if k_max > min(self.degree_cap, MAX_EXACT_DEGREE):
            raise ResourceError(
                f"exact polynomials up to degree {k_max} exceed the budget "
                f"({min(self.degree_cap, MAX_EXACT_DEGREE)})"
            )
        polys = [[Fraction(1)]]
        prev = [Fraction(0)]
        for k in range(k_max):
            a_k, b_k, c_k = self.rational[k]
            nxt = _poly_add(_poly_scale(_poly_shift(polys[k]), a_k), _poly_scale(polys[k], b_k))
            nxt = _poly_add(nxt, _poly_scale(prev, -c_k))
            prev = polys[k]
            polys.append(_poly_trim(nxt))
        return [PolyExact(tuple(p)) for p in polys]

    def orthonormal_table(self, x, k_max):
        """
        Orthonormal values p_k(x) for k = 0..k_max by forward recurrence.

        Returns:
            tuple: (Q, log_scale) with p_k(x_j) = Q[k, j] * exp(log_scale[j])
        """
        if k_max > self.degree_cap:
            raise PreconditionError(f"k_max={k_max} exceeds degree_cap={self.degree_cap}")
        x = np.atleast_1d(np.asarray(x, dtype=float))
        q = np.zeros((k_max + 1, x.size))
        log_scale = np.zeros(x.size)
        q[0] = 1.0 / math.sqrt(self.mass)
        if k_max >= 1:
            q[1] = (x - self.alpha[0]) * q[0] / self.beta[1]
        for k in range(1, k_max):
            q[k + 1] = ((x - self.alpha[k]) * q[k] - self.beta[k] * q[k - 1]) / self.beta[k + 1]
            big = np.abs(q[k + 1]) > RESCALE_THRESHOLD
            if big.any():
                q[: k + 2, big] /= RESCALE_THRESHOLD
                log_scale[big] += LOG_RESCALE
        return q, log_scale

    def project(self, x, g, k_max):
        """
        Streamed sums c_k = sum_j g_j p_k(x_j) for k = 0..k_max without
        storing the full table.
        """
        x = np.asarray(x, dtype=float)
        g = np.asarray(g, dtype=float)
        out = np.empty(k_max + 1)
        prev = np.zeros_like(x)
        cur = np.full_like(x, 1.0 / math.sqrt(self.mass))
        gs = g.copy()
        out[0] = np.sum(gs * cur)
        for k in range(k_max):
            nxt = ((x - self.alpha[k]) * cur - self.beta[k] * prev) / self.beta[k + 1]
            prev, cur = cur, nxt
            big = np.abs(cur) > RESCALE_THRESHOLD
            if big.any():
                cur[big] /= RESCALE_THRESHOLD
                prev[big] /= RESCALE_THRESHOLD
                gs[big] *= RESCALE_THRESHOLD
            out[k + 1] = np.sum(gs * cur)
        return out

    def values(self, x, k_max):
        """P_k(x) in the family's own normalisation (moderate |x| only)."""
        q, log_scale = self.orthonormal_table(x, k_max)
        return q * np.exp(log_scale)[None, :] * np.sqrt(self.norms_sq[: k_max + 1])[:, None]


def _check_cap(degree_cap):
    if degree_cap < 1:
        raise DomainError(f"degree_cap must be >= 1, got {degree_cap}")
    if degree_cap > MAX_DEGREE_CAP:
        raise ResourceError(f"degree_cap {degree_cap} exceeds {MAX_DEGREE_CAP}")


def mp_recurrence(ell, degree_cap):
    """Meixner-Pollaczek basis P_k^{(ell)} up to degree_cap."""
    if int(ell) != ell or ell < 1:
        raise DomainError(f"ell must be a positive integer, got {ell}")
    ell = int(ell)
    _check_cap(degree_cap)
    k = np.arange(degree_cap + 1, dtype=float)
    beta = np.sqrt(k * (k + ell - 1))
    norms = np.array([float(math.comb(j + ell - 1, j)) for j in range(degree_cap + 1)])
    rational = tuple(
        (Fraction(1, j + 1), Fraction(0), Fraction(j - 1 + ell, j + 1)) for j in range(degree_cap)
    )
    return OrthoBasis(
        family=Family.MP,
        param=ell,
        degree_cap=degree_cap,
        alpha=np.zeros(degree_cap + 1),
        beta=beta,
        norms_sq=norms,
        rational=rational,
    )


def laguerre_recurrence(degree_cap, alpha=0):
    """Generalised Laguerre basis for x^alpha e^{-x} / Gamma(alpha + 1)."""
    if alpha < 0:
        raise DomainError(f"alpha must be >= 0, got {alpha}")
    _check_cap(degree_cap)
    k = np.arange(degree_cap + 1, dtype=float)
    beta = -np.sqrt(k * (k + alpha))
    norms = np.exp(gammaln(k + alpha + 1.0) - gammaln(k + 1.0) - gammaln(alpha + 1.0))
    a = Fraction(alpha).limit_denominator(10 ** 6)
    rational = tuple(
        (Fraction(-1, j + 1), (2 * j + 1 + a) / (j + 1), (j + a) / (j + 1)) for j in range(degree_cap)
    )
    return OrthoBasis(
        family=Family.LAGUERRE,
        param=float(alpha),
        degree_cap=degree_cap,
        alpha=2.0 * k + 1.0 + alpha,
        beta=beta,
        norms_sq=norms,
        rational=rational,
    )


def generating_taylor(ell, degree_cap):
    """
    Taylor coefficients in s of e^{x arctan s} (1 + s^2)^{-ell/2}, exactly.

    exp(x A(s)) with A = arctan is expanded by the power-series exponential
    recurrence m E_m = sum_j j a_j x E_{m-j}, where j a_j = (-1)^{(j-1)/2}
    for odd j.
    """
    if int(ell) != ell or ell < 1:
        raise DomainError(f"ell must be a positive integer, got {ell}")
    if degree_cap > MAX_EXACT_DEGREE:
        raise ResourceError(f"degree {degree_cap} exceeds the exact budget {MAX_EXACT_DEGREE}")
    exp_terms = [[Fraction(1)]]
    for m in range(1, degree_cap + 1):
        acc = [Fraction(0)]
        for j in range(1, m + 1, 2):
            sign = 1 if (j - 1) // 2 % 2 == 0 else -1
            acc = _poly_add(acc, _poly_scale(_poly_shift(exp_terms[m - j]), sign))
        exp_terms.append(_poly_scale(acc, Fraction(1, m)))

    r = Fraction(-ell, 2)
    binom = [Fraction(1)]
    for n in range(1, degree_cap // 2 + 1):
        binom.append(binom[-1] * (r - n + 1) / n)

    out = []
    for k in range(degree_cap + 1):
        acc = [Fraction(0)]
        for n in range(k // 2 + 1):
            acc = _poly_add(acc, _poly_scale(exp_terms[k - 2 * n], binom[n]))
        out.append(PolyExact(tuple(_poly_trim(acc))))
    return out


def mp_eval(ell, k, z, degree_cap=MAX_DEGREE_CAP):
    """P_k^{(ell)}(z) by forward recurrence in extended-precision complex arithmetic."""
    if k < 0:
        raise DomainError(f"degree must be >= 0, got {k}")
    if k > min(degree_cap, MAX_DEGREE_CAP):
        raise ResourceError(f"degree {k} exceeds the cap {min(degree_cap, MAX_DEGREE_CAP)}")
    with mpmath.workdps(EVAL_DPS):
        zz = mpmath.mpc(complex(z))
        prev, cur = mpmath.mpc(0), mpmath.mpc(1)
        for j in range(k):
            prev, cur = cur, (zz * cur - (j - 1 + ell) * prev) / (j + 1)
        return complex(cur)


@dataclass(frozen=True)
class GaussRule:
    """Gauss rule of a basis; vectors holds the normalised eigenvector columns."""

    kind: str
    n: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    vectors: np.ndarray = field(repr=False, compare=False)

    def integrate(self, fn):
        return np.sum(self.weights * fn(self.nodes))


def gauss_rule(basis, n):
    """n-point Gauss rule from the Jacobi matrix of basis."""
    if n < 1 or n > basis.degree_cap:
        raise PreconditionError(f"rule size {n} must lie in [1, {basis.degree_cap}]")
    d = basis.alpha[:n]
    e = np.abs(basis.beta[1:n])
    try:
        nodes = eigvalsh_tridiagonal(d, e, lapack_driver="stebz")
    except (LinAlgError, ValueError) as exc:
        raise NumericError(
            "tridiagonal eigen-solve failed",
            {"basis": basis.name, "n": n, "error": str(exc)},
        ) from exc
    q, _ = basis.orthonormal_table(nodes, n - 1)
    norms = np.linalg.norm(q, axis=0)
    if not np.all(np.isfinite(norms)) or np.any(norms == 0):
        raise NumericError("degenerate eigenvector column", {"basis": basis.name, "n": n})
    vectors = q / norms[None, :]
    vectors = vectors * np.sign(vectors[0])[None, :]
    weights = basis.mass * vectors[0] ** 2
    logger.debug("gauss_rule %s n=%d: nodes in [%.6g, %.6g]", basis.name, n, nodes[0], nodes[-1])
    return GaussRule(kind=basis.name, n=n, nodes=nodes, weights=weights, vectors=vectors)


def mp_gram(ell, degree, extent=GRAM_EXTENT):
    """
    Gram matrix of P_0..P_degree under nu_ell by composite panels on |x| <= extent.

    P_k comes from its own three-term recurrence and nu_ell from its closed
    density; no recurrence table or Gauss rule enters.
    """
    if degree < 0 or degree > MAX_EXACT_DEGREE:
        raise PreconditionError(f"degree {degree} must lie in [0, {MAX_EXACT_DEGREE}]")
    w = measures.nu_ell(ell)
    x, wx = panel_rule(-extent, extent, breakpoints=tuple(w.kinks))
    root = np.sqrt(wx) * np.exp(0.5 * w.log_density(x))
    values = np.empty((degree + 1, x.size))
    prev, cur = np.zeros_like(x), np.ones_like(x)
    values[0] = cur
    for j in range(degree):
        prev, cur = cur, (x * cur - (j - 1 + ell) * prev) / (j + 1)
        values[j + 1] = cur
    scaled = values * root[None, :]
    return scaled @ scaled.T


def laguerre_eval(k, x):
    """L_k(x) by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    prev, cur = np.zeros_like(x), np.ones_like(x)
    for j in range(k):
        prev, cur = cur, ((2 * j + 1 - x) * cur - j * prev) / (j + 1)
    return cur


def laguerre_deriv(k, x):
    """L_k'(x) via L_{j+1}' = L_j' - L_j."""
    x = np.asarray(x, dtype=float)
    prev, cur = np.zeros_like(x), np.ones_like(x)
    d = np.zeros_like(x)
    for j in range(k):
        d = d - cur
        prev, cur = cur, ((2 * j + 1 - x) * cur - j * prev) / (j + 1)
    return d


def dump_recurrence_csv(basis, path):
    from utils.report import write_csv

    rows = [
        (k, basis.alpha[k], basis.beta[k], basis.norms_sq[k]) for k in range(basis.degree_cap + 1)
    ]
    write_csv(path, ("k", "a_k", "b_k", "norm_sq"), rows)


def dump_rule_csv(rule, path):
    from utils.report import write_csv

    write_csv(path, ("node", "weight"), zip(rule.nodes.tolist(), rule.weights.tolist()))

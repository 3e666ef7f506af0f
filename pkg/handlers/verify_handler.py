"""
Verify Handler for mpspec
Runs the identity and inequality suites behind `mpspec verify`
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from config.settings import (
    COSH_TRANSFORM_POINTS,
    DEPTH_GRID,
    DEPTH_V_EXTENT,
    DISK_RADII,
    DISK_SAMPLES,
    GAMMA_BAND,
    GAMMA_KS,
    HF_POINTS,
    IDENTITY_MAX_DEGREE,
    IDENTITY_POLYS,
    KHAT_POINTS,
    LEMMA22_FIXED_DEGREES,
    LEMMA22_MAX_DEGREE,
    LEMMA22_POLYS,
    MAIN_THEOREM_LAMBDAS,
    MAIN_THEOREM_N,
    MEASURE_RTOL,
    ORTHO_DEGREE,
    ORTHO_ELLS,
    TRANSFER_N_GRID,
)
from mpspec import functions, inequalities, measures, orthopoly, spectral, strip, tightness
from utils.helpers import SplitMix64
from utils.report import Suite, Table

logger = logging.getLogger(__name__)


def _rel(a, b):
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale > 0 else 0.0


class VerifyHandler:
    """Builds the verification suites."""

    def __init__(self):
        self.suites = []

    # -------------------------------------------------------------------------
    # MEASURES AND BASES
    # -------------------------------------------------------------------------

    def measures_suite(self, config):
        w = measures.weight_by_name(config.weight)
        suite = Suite(f"measures_{w.name}")
        total = measures.mass(w)
        suite.add("mass", total, 1.0, abs(total - 1.0) <= MEASURE_RTOL)
        if w.mgf_fn is not None:
            lo, hi = w.mgf_interval
            alpha = 0.5 * hi if math.isfinite(hi) else 0.5
            closed = measures.mgf(w, alpha)
            numeric = float(np.real(measures.integrate_against(w, lambda x: np.exp(alpha * x))))
            suite.add(f"mgf_{alpha:g}", numeric, closed, _rel(numeric, closed) <= MEASURE_RTOL)
        if w.symmetric:
            odd = float(np.real(measures.integrate_against(w, lambda x: x ** 3)))
            suite.add("odd_moment", odd, 0.0, abs(odd) <= MEASURE_RTOL)
        ok, lo_r, hi_r = measures.comparability_check(np.linspace(-60.0, 60.0, 2001))
        suite.add("comparability_min", lo_r, 1.0, ok)
        suite.add("comparability_max", hi_r, 2.0, ok)
        return suite

    def orthogonality_suite(self, config):
        suite = Suite("orthogonality")
        tol = config.tol("ortho")
        degree = min(config.N or ORTHO_DEGREE, config.rule - 1)
        for ell in ORTHO_ELLS:
            basis = orthopoly.mp_recurrence(ell, config.rule)
            rule = orthopoly.gauss_rule(basis, config.rule)
            q, log_scale = basis.orthonormal_table(rule.nodes, degree)
            scaled = q * np.sqrt(rule.weights * np.exp(2.0 * log_scale))[None, :]
            gram = scaled @ scaled.T
            err = float(np.max(np.abs(gram - np.eye(degree + 1))))
            suite.add(f"gram_gauss_ell{ell}", err, tol, err <= tol)

            norms = np.array([math.comb(k + ell - 1, k) for k in range(degree + 1)], dtype=float)
            panel = orthopoly.mp_gram(ell, degree) / np.sqrt(np.outer(norms, norms))
            err = float(np.max(np.abs(panel - np.eye(degree + 1))))
            suite.add(f"gram_panels_ell{ell}", err, tol, err <= tol)
            table = np.max(np.abs(basis.norms_sq[: degree + 1] / norms - 1.0))
            suite.add(f"norms_ell{ell}", float(table), config.tol("norm"), table <= config.tol("norm"))

            taylor = orthopoly.generating_taylor(ell, degree)
            exact = basis.exact_polys(degree)
            same = all(a.coeffs == b.coeffs for a, b in zip(taylor, exact))
            suite.add(f"generating_function_ell{ell}", same, True, same)
        return suite

    # -------------------------------------------------------------------------
    # STRIP IDENTITIES
    # -------------------------------------------------------------------------

    def identity_suite(self, config):
        suite = Suite("strip_identity")
        tol = config.tol("identity")
        for f, expected in ((functions.identity(), 1.0), (functions.square(), 8.0)):
            lhs = strip.weighted_sum_general(f, 1)
            rhs = strip.identity_rhs(f)
            suite.add(f"anchor_{f.name}", lhs, expected,
                      _rel(lhs, expected) <= tol and _rel(rhs, expected) <= tol)

        polys = functions.polynomial_suite(config.seed, IDENTITY_POLYS, IDENTITY_MAX_DEGREE)
        with ThreadPoolExecutor(max_workers=max(config.workers, 1)) as pool:
            pairs = list(pool.map(lambda f: (strip.weighted_sum_general(f, 1), strip.identity_rhs(f)), polys))
        errors = [_rel(a, b) for a, b in pairs]
        worst = max(errors)
        suite.add("random_polynomials", worst, tol, worst <= tol)

        f = functions.square()
        lhs2 = strip.weighted_sum_general(f, 2)
        rhs2 = strip.identity_rhs_general(f, 2)
        suite.add("general_ell2_x2", lhs2, rhs2, _rel(lhs2, rhs2) <= tol)

        f = polys[0]
        coeffs = spectral.expand(f, orthopoly.mp_recurrence(1, max(f.degree, 1)), max(f.degree, 1)).coeffs
        worst = 0.0
        for z in HF_POINTS:
            expected = strip.hf_prime_from_coeffs(coeffs, z)
            worst = max(worst, abs(strip.hf_prime(f, z) - expected) / max(abs(expected), 1e-300))
        suite.add("laplace_representation", worst, config.tol("hf"), worst <= config.tol("hf"))
        return suite

    def kernel_suite(self, config):
        suite = Suite("kernel_fourier")
        tol = config.tol("khat")
        v = np.linspace(-6.0, 6.0, KHAT_POINTS)
        err = float(np.max(np.abs(strip.khat_numeric(v) - strip.khat_closed(v))))
        suite.add("khat_max_error", err, tol, err <= tol)
        anchor = float(strip.khat_closed(0.0))
        expected = 4.0 / (1.0 + math.sqrt(2.0))
        suite.add("khat_zero", anchor, expected, abs(anchor - expected) <= 1e-15)
        worst = max(abs(a - b) for a, b in (strip.cosh_transform_integral(x) for x in COSH_TRANSFORM_POINTS))
        suite.add("contour_integral", worst, tol, worst <= tol)
        return suite

    # -------------------------------------------------------------------------
    # GAMMA_PHI AND LEMMA-LEVEL SANDWICHES
    # -------------------------------------------------------------------------

    def gamma_suite(self, config):
        suite = Suite("gamma_sandwich")
        for name, factory in spectral.PROFILE_FACTORIES.items():
            p = factory()
            results = [spectral.gamma_sandwich_check(p, k) for k in GAMMA_KS]
            margin = min(min(r.lower_margin, r.upper_margin) / r.value for r in results)
            suite.add(f"sandwich_{name}", margin, 0.0, all(r.ok for r in results))
            closed = p.gamma(np.array(GAMMA_KS))
            err = max(_rel(r.value, c) for r, c in zip(results, closed))
            suite.add(f"closed_form_{name}", err, 1e-8, err <= 1e-8)

        p = spectral.log_squared_profile()
        ks = np.array(GAMMA_KS, dtype=float)
        band = p.gamma(ks) / np.log(math.e + ks) ** 2
        lo, hi = GAMMA_BAND
        suite.add("log2_band_min", float(np.min(band)), lo, float(np.min(band)) >= lo)
        suite.add("log2_band_max", float(np.max(band)), hi, float(np.max(band)) <= hi)
        return suite

    def double_integral_suite(self, config):
        suite = Suite("gamma_double_integral")
        rng = SplitMix64(config.seed + 1)
        polys = [functions.identity(), functions.square()]
        polys += functions.polynomial_suite(config.seed, LEMMA22_POLYS, LEMMA22_MAX_DEGREE)
        polys += [functions.random_polynomial(rng, d, min_degree=d) for d in LEMMA22_FIXED_DEGREES]
        profiles = [spectral.constant_profile(), spectral.log_squared_profile()]
        jobs = [(f, p) for f in polys for p in profiles]
        with ThreadPoolExecutor(max_workers=max(config.workers, 1)) as pool:
            bounds = list(pool.map(lambda job: strip.lemma22_bounds(*job), jobs))
            disk = list(pool.map(
                lambda job: _rel(strip.disk_integral_lhs(*job), strip.disk_integral_rhs(*job)), jobs))
        for (f, p), b in zip(jobs, bounds):
            logger.info("double integral %s/%s margins: %.3e, %.3e", f.name, p.name, b.target - b.lower, b.upper - b.target)
        suite.add("strict_lower", min(b.target - b.lower for b in bounds), 0.0, all(b.lower < b.target for b in bounds))
        suite.add("strict_upper", min(b.upper - b.target for b in bounds), 0.0, all(b.target < b.upper for b in bounds))
        err = max(_rel(b.exact, b.target) for b in bounds)
        suite.add("exact_depth", err, config.tol("lemma22_exact"), err <= config.tol("lemma22_exact"))

        worst = max(disk)
        suite.add("disk_identity", worst, config.tol("disk_identity"), worst <= config.tol("disk_identity"))
        return suite

    def hyperbolic_suite(self, config):
        suite = Suite("hyperbolic_inequalities")
        for row in inequalities.hyperbolic_checks():
            suite.add(row.name, row.margin, 0.0, row.passed)
        return suite

    def geometry_suite(self, config):
        suite = Suite("disk_geometry")
        rng = SplitMix64(config.seed)
        for r in DISK_RADII:
            rho = r * np.sqrt(rng.uniforms(DISK_SAMPLES, 0.0, 1.0))
            angle = rng.uniforms(DISK_SAMPLES, 0.0, 2.0 * math.pi)
            z = np.arctan(rho * np.exp(1j * angle))
            misses = int(np.sum(~strip.disk_image_contains(z, r)))
            suite.add(f"membership_r{r:g}", misses, 0, misses == 0)

            outer = np.sqrt(rng.uniforms(DISK_SAMPLES, (r * (1.0 + 1e-6)) ** 2, 1.0))
            angle = rng.uniforms(DISK_SAMPLES, 0.0, 2.0 * math.pi)
            z = np.arctan(outer * np.exp(1j * angle))
            hits = int(np.sum(strip.disk_image_contains(z, r, tol=0.0)))
            suite.add(f"exterior_r{r:g}", hits, 0, hits == 0)

        anchor = strip.disk_image_radius(0.0, 1.0 / math.sqrt(3.0))
        expected = 2.0 + math.sqrt(3.0)
        suite.add("radius_anchor", anchor, expected, abs(anchor - expected) <= 1e-12)

        u = np.linspace(-strip.QUARTER_PI, strip.QUARTER_PI, DEPTH_GRID + 2)[1:-1]
        v = np.linspace(-DEPTH_V_EXTENT, DEPTH_V_EXTENT, DEPTH_GRID)
        violations = 0
        worst = 0.0
        for uu in u:
            for vv in v:
                a = strip.strip_depth_a(float(uu), float(vv))
                lo, hi = strip.depth_bounds(uu, vv)
                violations += int(not lo <= a <= hi)
                worst = max(worst, abs(a - float(strip.strip_depth_closed(uu, vv))))
        suite.add("depth_sandwich", violations, 0, violations == 0)
        suite.add("depth_closed_form", worst, 1e-9, worst <= 1e-9)
        return suite

    # -------------------------------------------------------------------------
    # MAIN THEOREM AND MEASURE TRANSFER
    # -------------------------------------------------------------------------

    def _theorem_functions(self, config):
        suite = functions.polynomial_suite(config.seed, 4, 6, min_degree=1)
        suite += [tightness.flambda(lam) for lam in MAIN_THEOREM_LAMBDAS]
        suite += [functions.abs_clip(c) for c in (1.0, 2.0, 3.0)]
        return suite

    def theorem_suite(self, config):
        suite = Suite("main_theorem")
        fs = self._theorem_functions(config)
        n = MAIN_THEOREM_N
        with ThreadPoolExecutor(max_workers=max(config.workers, 1)) as pool:
            coarse = list(pool.map(lambda f: spectral.main_theorem_sides(f, n), fs))
            fine = list(pool.map(lambda f: spectral.main_theorem_sides(f, 2 * n), fs))
        finite = all(math.isfinite(s.ratio59) and math.isfinite(s.ratio60) for s in coarse + fine)
        suite.add("ratios_finite", finite, True, finite)
        for label in ("ratio59", "ratio60"):
            a = max(getattr(s, label) for s in coarse)
            b = max(getattr(s, label) for s in fine)
            change = _rel(a, b)
            suite.add(f"{label}_stability", change, config.tol("stability"), change <= config.tol("stability"))
            suite.add(f"{label}_max", b, None, math.isfinite(b))

        transfer = [spectral.measure_transfer_check(f, TRANSFER_N_GRID)
                    for f in (functions.abs_clip(1.0), functions.square())]
        ratios = np.concatenate([t.ratios for t in transfer])
        ok = all(t.ok for t in transfer)
        suite.add("transfer_min_ratio", float(np.min(ratios)), 1.0, ok)
        suite.add("transfer_max_ratio", float(np.max(ratios)), 2.0, ok)
        return suite

    def run(self, config):
        """
        Run every verification suite in a fixed order.

        Returns:
            tuple: (list of Suite, list of Table)
        """
        builders = [
            self.measures_suite,
            self.orthogonality_suite,
            self.identity_suite,
            self.kernel_suite,
            self.gamma_suite,
            self.double_integral_suite,
            self.hyperbolic_suite,
            self.geometry_suite,
            self.theorem_suite,
        ]
        self.suites = []
        for build in builders:
            suite = build(config)
            status = "ok" if suite.passed else "FAILED"
            print(f"  {suite.name:<28} {status}")
            self.suites.append(suite)

        v = np.linspace(-6.0, 6.0, KHAT_POINTS)
        table = Table("khat", ("v", "khat_numeric", "khat_closed"),
                      list(zip(v.tolist(), strip.khat_numeric(v).tolist(), strip.khat_closed(v).tolist())))
        return self.suites, [table]


# Singleton instance
_verify_handler = None


def get_verify_handler():
    """Get or create the singleton verify handler."""
    global _verify_handler
    if _verify_handler is None:
        _verify_handler = VerifyHandler()
    return _verify_handler

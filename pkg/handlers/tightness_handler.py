"""
Tightness Handler for mpspec
Gaussian divergence experiment behind `mpspec tightness`
"""

import logging

import numpy as np

from config.settings import (
    BOUNDED_SPREAD,
    DIVERGENCE_MIN_RATIO,
    DIVERGENCE_RTOL,
    EN_TABLE,
    SLOPE_RANGE,
    TIGHTNESS_N,
)
from mpspec import tightness
from utils.report import Suite, Table

logger = logging.getLogger(__name__)


class TightnessHandler:
    """Runs the F_lambda experiment for a diverging and a constant a_k."""

    def __init__(self):
        self.reports = {}

    def run(self, config):
        """
        Returns:
            tuple: (list of Suite, list of Table)
        """
        N = config.N or TIGHTNESS_N
        lams = list(config.lambdas)
        diverging = tightness.divergence_experiment(tightness.a_loglog, lams, N, workers=config.workers)
        constant = tightness.divergence_experiment(tightness.a_constant, lams, N, workers=config.workers)
        self.reports = {"loglog": diverging, "constant": constant}

        trend = Suite("tightness_trend")
        lo, hi = SLOPE_RANGE
        trend.add("k_energy_slope", diverging.slope, hi, lo <= diverging.slope <= hi)
        trend.add("loglog_increasing", diverging.increasing, True, diverging.increasing)
        trend.add("loglog_growth", diverging.growth_ratio, DIVERGENCE_MIN_RATIO,
                  diverging.growth_ratio >= DIVERGENCE_MIN_RATIO)
        trend.add("constant_spread", constant.spread, BOUNDED_SPREAD, constant.spread <= BOUNDED_SPREAD)
        trend.add("en_min_product", diverging.en_bound, None, diverging.en_bounded)

        # Unresolved rows only bracket the weighted sum; the trend checks above use the brackets
        resolution = Suite("tightness_resolution")
        for name, report in self.reports.items():
            for row in report.rows:
                ratio = row.tail_upper / row.head if row.head > 0 else float("inf")
                resolution.add(f"{name}_resolved_{row.lam:g}", ratio, DIVERGENCE_RTOL, row.resolved)
            if not report.resolved:
                logger.warning("tightness %s: unresolved at N=%d for lambda %s", name, N, report.unresolved_lambdas)

        support = Suite("tightness_support")
        tau = tightness.build_tau(tightness.a_loglog)
        for name, ok in tightness.tau_invariants(tau, tightness.a_loglog).items():
            support.add(f"tau_{name}", ok, True, ok)
        for lam in lams:
            value, bound = tightness.flambda_energy_budget(lam)
            support.add(f"energy_budget_{lam:g}", value, bound, value <= bound)
        v = np.linspace(-4.0, 4.0, 17)
        lam = lams[len(lams) // 2]
        err = float(np.max(np.abs(tightness.flambda_delta_hat_numeric(lam, v) - tightness.flambda_delta_hat(lam, v))))
        scale = float(np.max(np.abs(tightness.flambda_delta_hat(lam, v))))
        support.add(f"delta_hat_{lam:g}", err / scale, 1e-8, err <= 1e-8 * scale)

        for suite in (trend, resolution, support):
            print(f"  {suite.name:<28} {'ok' if suite.passed else 'FAILED'}")

        header = ["lambda", "weighted_loglog", "weighted_loglog_upper", "weighted_constant",
                  "weighted_constant_upper", "k_energy", "tail_bracket", "residual", "resolved"]
        header += [f"E_{n}" for n in EN_TABLE] + [f"min_product_{n}" for n in EN_TABLE]
        rows = []
        for d, c in zip(diverging.rows, constant.rows):
            rows.append(
                [d.lam, d.weighted_sum, d.weighted_upper, c.weighted_sum, c.weighted_upper,
                 d.k_energy, d.tail_bracket, d.residual, d.resolved and c.resolved]
                + [d.en[n] for n in EN_TABLE]
                + [d.min_products[n] for n in EN_TABLE]
            )
        return [trend, resolution, support], [Table("divergence", header, rows)]


# Singleton instance
_tightness_handler = None


def get_tightness_handler():
    """Get or create the singleton tightness handler."""
    global _tightness_handler
    if _tightness_handler is None:
        _tightness_handler = TightnessHandler()
    return _tightness_handler

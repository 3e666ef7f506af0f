"""
Rates Handler for mpspec
Two-sided and half-line approximation rates behind `mpspec rates`
"""

import logging

from config.settings import LAGUERRE_N_GRID, RATE_N_GRID, RATE_SPREAD
from mpspec import functions, tensor
from utils.report import Suite, Table

logger = logging.getLogger(__name__)


class RatesHandler:
    """E_n tables for a named test function under nu and under mu~_1."""

    def run(self, config):
        """
        Returns:
            tuple: (list of Suite, list of Table)
        """
        f_two, f_half = functions.pair_by_name(config.function)
        n_grid = config.n_grid or RATE_N_GRID
        comparison = tensor.rate_comparison(f_two, f_half, n_grid)

        suite = Suite(f"rates_{config.function}")
        suite.add("two_sided_spread", comparison.spread, RATE_SPREAD, comparison.two_sided_bounded)
        worst = max(r.en_times_n for r in comparison.rows)
        suite.add("half_sided_max", worst, comparison.sobolev, comparison.half_sided_bounded)

        laguerre_grid = [n for n in LAGUERRE_N_GRID if n <= max(n_grid)] or list(LAGUERRE_N_GRID)
        laguerre = tensor.laguerre_rate_check(f_half, laguerre_grid)
        suite.add("laguerre_ratio_max", max(r.ratio for r in laguerre.rows), 1.0, laguerre.ok)
        print(f"  {suite.name:<28} {'ok' if suite.passed else 'FAILED'}")

        table = Table(
            "rates",
            ("n", "en_two_sided", "en_times_log2n", "en_half", "en_times_n"),
            [(r.n, r.en_two_sided, r.en_times_log2n, r.en_half, r.en_times_n) for r in comparison.rows],
        )
        laguerre_table = Table(
            "laguerre",
            ("n", "en", "bound", "ratio"),
            [(r.n, r.en, r.bound, r.ratio) for r in laguerre.rows],
        )
        logger.info("rates %s: spread %.4g, sobolev %.6g", config.function, comparison.spread, comparison.sobolev)
        return [suite], [table, laguerre_table]


# Singleton instance
_rates_handler = None


def get_rates_handler():
    """Get or create the singleton rates handler."""
    global _rates_handler
    if _rates_handler is None:
        _rates_handler = RatesHandler()
    return _rates_handler

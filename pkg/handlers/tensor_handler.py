"""
Tensor Handler for mpspec
Two-dimensional product-measure checks behind `mpspec tensor`
"""

import logging

import numpy as np

from config.settings import LIPSCHITZ_N_GRID, RATE_SPREAD, TENSOR_MARGIN_N, TENSOR_N
from mpspec import functions, tensor
from utils.report import Suite, Table

logger = logging.getLogger(__name__)


class TensorHandler:
    """Tensorization inequality, separability and the Lipschitz corollary in d = 2."""

    def __init__(self):
        self.margin = None

    def run(self, config):
        """
        Returns:
            tuple: (list of Suite, list of Table)
        """
        N = config.N or TENSOR_N
        self.margin = tensor.one_dimensional_margin(TENSOR_MARGIN_N, tensor.one_dimensional_suite(config.seed))
        logger.info("tensor: measured 1-D margin %.6g", self.margin)

        inequality = Suite("tensorization")
        for name, f, grads, kinks in tensor.tensor_suite():
            result = tensor.tensorization_check(f, grads, 2, N, self.margin, kinks=kinks)
            inequality.add(name, result.lhs / result.rhs, result.margin, result.ok)

        separable = Suite("separable")
        g = functions.gaussian_bump()
        one = tensor.product_expand(lambda x: g(x), 1, N).coeffs
        two = tensor.product_expand(lambda x, y: g(x) * g(y), 2, N).coeffs
        err = float(np.max(np.abs(two - np.outer(one, one))))
        separable.add("factorization", err, config.tol("separable"), err <= config.tol("separable"))

        rows, bounded = tensor.lipschitz_corollary(N, [n for n in LIPSCHITZ_N_GRID if n < N] or [N - 1])
        column = [r[2] for r in rows]
        spread = max(column) / float(np.median(column)) if np.median(column) > 0 else 0.0
        separable.add("lipschitz_spread", spread, RATE_SPREAD, bounded)

        for suite in (inequality, separable):
            print(f"  {suite.name:<28} {'ok' if suite.passed else 'FAILED'}")
        table = Table("lipschitz", ("n", "en", "en_times_log2n"), rows)
        return [inequality, separable], [table]


# Singleton instance
_tensor_handler = None


def get_tensor_handler():
    """Get or create the singleton tensor handler."""
    global _tensor_handler
    if _tensor_handler is None:
        _tensor_handler = TensorHandler()
    return _tensor_handler

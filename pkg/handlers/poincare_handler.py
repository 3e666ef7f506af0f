"""
Poincare Handler for mpspec
Spectral-gap estimates and the perturbation bound behind `mpspec poincare`
"""

import logging
import math

from config.settings import POINCARE_REFINE_RTOL, POINCARE_SCALING_LAMBDAS, POINCARE_TARGETS
from mpspec import inequalities, measures
from utils.report import Suite, Table

logger = logging.getLogger(__name__)


class PoincareHandler:
    """Estimates C_P for the selected weight and checks the perturbation lemma on sech."""

    def run(self, config):
        """
        Returns:
            tuple: (list of Suite, list of Table)
        """
        w = measures.weight_by_name(config.weight)
        estimate = inequalities.poincare_estimate(w, workers=config.workers)

        suite = Suite(f"poincare_{w.name}")
        suite.add("refinement", estimate.change, POINCARE_REFINE_RTOL, estimate.converged)
        target = POINCARE_TARGETS.get(config.weight)
        if target is not None:
            rel = abs(estimate.refined - target) / target
            suite.add("known_constant", estimate.refined, target, rel <= config.tol("poincare_target"))

        rows = [(w.name, 1.0, estimate.estimate, estimate.refined)]
        for check in inequalities.poincare_scaling_check(w, POINCARE_SCALING_LAMBDAS):
            ok = abs(check.ratio - 1.0) <= config.tol("poincare_scaling")
            suite.add(f"scaling_{check.lam:g}", check.ratio, 1.0, ok)
            rows.append((f"{w.name}_dilated", check.lam, check.dilated, None))

        perturbation = Suite("perturbation")
        result = inequalities.poincare_perturbation_check(measures.sech())
        perturbation.add("perturbed_constant", result.lhs, result.bound, result.ok)
        trivial = inequalities.perturbation_bound(result.base.estimate)
        perturbation.add("unperturbed_sanity", result.base.estimate, trivial, result.base.estimate <= trivial)
        if result.dilation is not None:
            rel = abs(result.dilated_constant - math.e / 4.0) / (math.e / 4.0)
            perturbation.add("dilation_branch", result.dilated_constant, math.e / 4.0,
                             rel <= config.tol("poincare_scaling"))
            rows.append(("sech_dilated", result.dilation, result.dilated_constant, None))
        rows.append((result.perturbed.weight_name, 1.0, result.perturbed.estimate, result.perturbed.refined))

        for s in (suite, perturbation):
            print(f"  {s.name:<28} {'ok' if s.passed else 'FAILED'}")
        table = Table("estimates", ("weight", "lambda", "estimate", "refined"), rows)
        return [suite, perturbation], [table]


# Singleton instance
_poincare_handler = None


def get_poincare_handler():
    """Get or create the singleton Poincare handler."""
    global _poincare_handler
    if _poincare_handler is None:
        _poincare_handler = PoincareHandler()
    return _poincare_handler

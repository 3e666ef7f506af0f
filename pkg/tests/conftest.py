"""
Shared fixtures for the mpspec test suite
"""

import os
import sys

import pytest

# Add the repository root to the path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from mpspec import functions, measures, orthopoly, spectral  # noqa: E402


@pytest.fixture(scope="module")
def sech():
    return measures.sech()


@pytest.fixture(scope="module")
def mp1():
    return orthopoly.mp_recurrence(1, 256)


@pytest.fixture(scope="module")
def poly_suite():
    return functions.polynomial_suite(7, 20, 15)


@pytest.fixture(scope="module")
def log2_profile():
    return spectral.log_squared_profile()

"""
Configuration Settings for mpspec
Meixner-Pollaczek spectral toolkit
"""

import math
import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# =============================================================================
# RUNTIME CONFIGURATION
# =============================================================================
LOG_LEVEL = os.environ.get("MPSPEC_LOG_LEVEL", "WARNING")
WORKERS = int(os.environ.get("MPSPEC_WORKERS", "1"))
OUTPUT_DIR = os.environ.get("MPSPEC_OUTPUT_DIR", ".")

# =============================================================================
# QUADRATURE CONFIGURATION
# =============================================================================
LOG_DENSITY_FLOOR = -80.0  # truncate where log density drops below this
PANEL_WIDTH = 0.25  # composite Gauss-Legendre panel width on the real line
PANEL_ORDER = 20  # Gauss-Legendre nodes per panel
MARCH_BLOCK = 4.0  # outward marching block length for growth-driven integrals
MARCH_RTOL = 1e-18  # stop marching once a block adds less than this share
MARCH_MAX_EXTENT = 2000.0  # hard cap on marching; exceeded means divergence
FOURIER_PANELS_PER_UNIT_FREQ = 1.0  # extra panel refinement for |v| > FOURIER_REFINE_SWITCH
FOURIER_REFINE_SWITCH = 4.0

# =============================================================================
# ORTHOPOLY CONFIGURATION
# =============================================================================
MAX_DEGREE_CAP = 1 << 16  # largest recurrence table we build
MAX_EXACT_DEGREE = 160  # rational-arithmetic budget for exact polynomials
EVAL_DPS = 32  # mpmath working precision for mp_eval (double-double range)
RESCALE_THRESHOLD = 1e100  # forward recurrence rescaling trigger
GRAM_EXTENT = 300.0  # |x| range for the panel Gram matrix of nu_ell up to degree 60

# =============================================================================
# SPECTRAL CONFIGURATION
# =============================================================================
EXPANSION_PANEL_EXTENT = 64.0  # |x| range for panel expansions under sech-type weights
GAMMA_RTOL = 1e-12  # scipy quad tolerance for Gamma_phi
STIELTJES_EXTENT = 60.0
STIELTJES_PANEL_WIDTH = 0.5
STIELTJES_PANEL_ORDER = 20
TRANSFER_C = 1.0  # corrected sandwich constants (c, C)
TRANSFER_BIG_C = 2.0

# =============================================================================
# STRIP CONFIGURATION
# =============================================================================
NU2_SERIES_CUTOFF = 1e-3  # x/sinh(pi x/2) series below this |x|
DEPTH_XTOL = 1e-12  # bisection tolerance for a(u, v)
LEMMA22_U_NODES = 32  # Gauss-Legendre nodes in u on (-pi/4, pi/4)
LEMMA22_V_EXTENT = 14.0
LEMMA22_V_PANEL = 0.25
LEMMA22_V_ORDER = 12
LEMMA22_X_PANEL = 0.25
LEMMA22_X_ORDER = 16
KHAT_EXTENT = 48.0
DISK_RADIAL_NODES = 40
DISK_ANGULAR_NODES = 64

# =============================================================================
# TIGHTNESS CONFIGURATION
# =============================================================================
LAMBDA_MAX = 3.5
LAMBDA_GRID = (1.0, 1.5, 2.0, 2.5, 3.0)
TIGHTNESS_N = 4096
TAIL_RTOL = 1e-6  # tail-dominance requirement for flambda_weighted_energy
DIVERGENCE_RTOL = 1e-3  # upper tail bound over head for a resolved divergence row
EN_TABLE = (2, 8, 32, 128)
EN_MIN_BOUND = 2.0  # bound on E_n * min(n / e^{lambda^2}, lambda^2)
SLOPE_RANGE = (0.8, 1.1)
DIVERGENCE_MIN_RATIO = 10.0
BOUNDED_SPREAD = 5.0
TAU_K_MAX = 100_000
TAU_X_MAX = 1e6

# =============================================================================
# TENSOR CONFIGURATION
# =============================================================================
TENSOR_MAX_DIM = 3
TENSOR_MAX_N = 48
TENSOR_MAX_POINTS = 6_000_000
TENSOR_EXTENT = 40.0
TENSOR_PANEL_WIDTH = 0.5
TENSOR_PANEL_ORDER = 12
TENSOR_N = 24  # per-axis degree for the 2-D checks
TENSOR_MARGIN_N = 128  # degree of the 1-D runs that fix the margin
SEPARABLE_TOL = 1e-9
LIPSCHITZ_N_GRID = (4, 8, 16, 24)
LAGUERRE_SQRT_EXTENT = 16.0  # t = sqrt(x) range for half-line integrals
LAGUERRE_PANEL_WIDTH = 0.125
LAGUERRE_PANEL_ORDER = 24
RATE_SPREAD = 3.0
RATE_N_GRID = (8, 16, 32, 64, 128, 256, 512)
LAGUERRE_N_GRID = tuple(range(1, 129))

# =============================================================================
# POINCARE CONFIGURATION
# =============================================================================
POINCARE_EXTENT = 40.0
POINCARE_POINTS = 8001
POINCARE_REFINE_RTOL = 0.02
POINCARE_SCALING_RTOL = 0.02
POINCARE_TARGET_RTOL = 0.05
POINCARE_SCALING_LAMBDAS = (0.5, 2.0)
# reference constants for weights with a known spectral gap
POINCARE_TARGETS = {
    "two_sided_exp": 4.0,
    "half_exp": 4.0,
    "gaussian": 1.0,
    "sech": 16.0 / math.pi ** 2,
}

# =============================================================================
# VERIFY SUITE CONFIGURATION
# =============================================================================
ORTHO_ELLS = (1, 2, 3)
ORTHO_DEGREE = 60
ORTHO_RULE = 200
ORTHO_TOL = 1e-9
IDENTITY_POLYS = 20
IDENTITY_MAX_DEGREE = 15
IDENTITY_RTOL = 1e-8
KHAT_POINTS = 121
KHAT_TOL = 1e-8
GAMMA_KS = tuple(2 ** i for i in range(15))
GAMMA_BAND = (1.0 / 64.0, 8.0)
HYPERBOLIC_GRID_POINTS = 10_000
HYPERBOLIC_GRID_RANGE = 50.0
DISK_SAMPLES = 10_000
DISK_RADII = (0.5, 0.9, 0.99)
DEPTH_GRID = 41
DEPTH_V_EXTENT = 4.0  # depth sandwich grid covers |v| <= this
LEMMA22_MAX_DEGREE = 15
LEMMA22_POLYS = 20
LEMMA22_FIXED_DEGREES = (6, 8)  # random polynomials of exactly these degrees join the suite
LEMMA22_EXACT_RTOL = 1e-4  # exact-depth middle value against sum Gamma_phi(k) f_k^2
DISK_IDENTITY_RTOL = 1e-9
NORM_RTOL = 1e-9
MEASURE_RTOL = 1e-9
HF_RTOL = 1e-8
HF_POINTS = (0.0, 0.3 + 0.2j, -0.5 + 0.7j)
COSH_TRANSFORM_POINTS = (0.0, 0.5, 1.0, 2.0, 4.0)
MAIN_THEOREM_N = 128
MAIN_THEOREM_STABILITY = 0.05
MAIN_THEOREM_LAMBDAS = (1.0, 1.5, 2.0)
TRANSFER_N_GRID = (1, 2, 4, 8, 16)

# =============================================================================
# CLI / REPORT CONFIGURATION
# =============================================================================
DEFAULT_SEED = int(os.environ.get("MPSPEC_SEED", "7"))
DEFAULT_FORMAT = "csv"
FORMATS = ("csv", "json")
DEFAULT_FUNCTION = "abs_clip"
# tolerances the CLI may override (--tol name=value or "tolerances" in --config)
TOLERANCE_DEFAULTS = {
    "ortho": ORTHO_TOL,
    "identity": IDENTITY_RTOL,
    "khat": KHAT_TOL,
    "norm": NORM_RTOL,
    "hf": HF_RTOL,
    "disk_identity": DISK_IDENTITY_RTOL,
    "lemma22_exact": LEMMA22_EXACT_RTOL,
    "stability": MAIN_THEOREM_STABILITY,
    "separable": SEPARABLE_TOL,
    "poincare_target": POINCARE_TARGET_RTOL,
    "poincare_scaling": POINCARE_SCALING_RTOL,
}
FLOAT_DIGITS = 17
EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3
COMMANDS = ("verify", "rates", "tightness", "tensor", "poincare")
WEIGHT_NAMES = ("sech", "two_sided_exp", "nu2", "nu3", "half_exp", "gaussian")

# =============================================================================
# SYSTEM MESSAGES
# =============================================================================
MESSAGES = {
    "banner": "mpspec - Meixner-Pollaczek spectral toolkit",
    "all_passed": "All checks passed.",
    "failed": "Check failed: {name}",
    "interrupted": "Interrupted; remaining suites skipped.",
    "usage": "Usage error: {detail}",
    "numeric": "Numeric failure: {detail}",
    "written": "Report written to {path}",
}

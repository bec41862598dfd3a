"""Immutable constants: file names, enums and numeric defaults."""

from __future__ import annotations

import math
from enum import IntEnum, StrEnum

# ---------------------------------------------------------------------------
# Output file names (relative to the run's output directory)
# ---------------------------------------------------------------------------
DIR_OUTPUT = "./output"

FILE_RESOLVED_CONFIG = "resolved_config.json"
FILE_SAMPLES_CSV = "samples.csv"
FILE_COHERENCE_JSON = "coherence.json"
FILE_MODES_JSON = "modes.json"
FILE_MATRIX_CSV = "matrix.csv"
FILE_MATRIX_JSON = "matrix.json"
FILE_RUN_JSON = "run.json"
FILE_RHO_TRACE = "rho_trace.dat"
FILE_RECOVERY_JSON = "recovery.json"
FILE_COEFFS_CSV = "coefficients.csv"
FILE_MEASUREMENTS_CSV = "measurements.csv"
FILE_PHASE_CSV = "phase.csv"
FILE_PHASE_JSON = "phase.json"
FILE_CONTOUR = "contour50.dat"
FILE_FARFIELD_CSV = "farfield_errors.csv"
FILE_FARFIELD_JSON = "farfield.json"
FILE_BENCHMARK_CSV = "benchmark.csv"
FILE_LP_SWEEP_CSV = "lp_sweep.csv"
FILE_RUN_STORE = "optimized.db"

# Sidecar suffix holding provenance for sampling CSV files
SIDECAR_SUFFIX = ".json"

SAMPLES_HEADER = ("theta", "phi", "chi")
MEASUREMENTS_HEADER = ("re", "im")

# Environment overrides (limited to output directory and job count)
ENV_OUTPUT_DIR = "WIGNER_CS_OUTPUT_DIR"
ENV_JOBS = "WIGNER_CS_JOBS"

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# Enums
# ---------------------------------------------------------------------------
class ModeKind(StrEnum):
    """Sensing-matrix family."""
    WIGNER_GENERAL = "wigner"
    SPHERICAL_HARMONICS = "sh"
    SNF_MU_PM1 = "snf"


class Provenance(StrEnum):
    """Where a sampling set came from."""
    RANDOM = "random"
    SPIRAL = "spiral"
    HAMMERSLEY = "hammersley"
    EQUIANGULAR = "equiangular"
    OPTIMIZED_GD = "optimized_gd"
    OPTIMIZED_ALM = "optimized_alm"
    FILE = "file"


class Sampler(StrEnum):
    """Sampling strategies available to the experiment harness."""
    SPIRAL = "spiral"
    HAMMERSLEY = "hammersley"
    RANDOM = "random"
    OPTIMIZED_GD = "gd"
    OPTIMIZED_ALM = "alm"


class ChiPolicyKind(StrEnum):
    """Polarization-angle assignment policies."""
    EVEN_SPREAD = "even"
    ALTERNATE_PAIR = "alternate"
    FIXED = "fixed"
    FREE = "free"


class DualUpdate(StrEnum):
    """Multiplier update used by the augmented Lagrangian optimizer."""
    STANDARD = "standard"   # u += tau * (z - g)
    LITERAL = "literal"     # u += tau * (z - g + u)


class SmcModel(StrEnum):
    """Synthetic spherical-mode-coefficient models."""
    EXACT_SPARSE = "sparse"
    COMPRESSIBLE = "compressible"


class Stream(IntEnum):
    """Random-stream identifiers for counter-based seed splitting."""
    OPTIMIZER_INIT = 1
    RANDOM_SAMPLER = 2
    SMC = 3
    TRIAL = 4
    DISCREPANCY = 6


# ---------------------------------------------------------------------------
# Numeric defaults
# ---------------------------------------------------------------------------

# Tolerance on |x| > 1 for Jacobi evaluation
JACOBI_DOMAIN_TOL = 1e-10

# θ clamp used by the Wigner d derivative at the poles
THETA_EPS = 1e-7

# Generalized-spiral constant
SPIRAL_C = 3.6

# Optimizer defaults
DEFAULT_P = 6.0
DEFAULT_ETA = 0.1
DEFAULT_T = 200
DEFAULT_RESTARTS = 5
MAX_HALVINGS = 20
REPERTURB_NOISE = 1e-3
MAX_REPERTURB = 10

DEFAULT_TAU = 1.0
DEFAULT_LAMBDA_REG = 1.0
DEFAULT_ETA_Z = 0.5
DEFAULT_ETA_INNER = 0.1
DEFAULT_INNER_ITERS = 5

# Basis pursuit defaults
DEFAULT_TOL_PRIMAL = 1e-6
DEFAULT_TOL_DUAL = 1e-6
DEFAULT_MAX_ITERS = 2000
DEFAULT_RHO_ADMM = 1.0
RESIDUAL_BALANCE_RATIO = 10.0
RANK_RTOL = 1e-10

# Experiment defaults
DEFAULT_REL_TOL = 1e-4
DEFAULT_TRIALS = 50
DEFAULT_DECAY_RATE = 2.0
FARFIELD_FLOOR_DB = -60.0
DB_CLIP = -300.0
TRUNCATION_N0 = 10
TRUNCATION_ROUND_TOL = 1e-9

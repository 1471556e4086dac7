"""
Global application settings for orbitlab.
"""

import os

# Version information: single source of truth lives in __version__.py
from orbitlab.__version__ import __version__ as VERSION

# General settings
DEBUG = False
VERBOSE = False
SILENT = False
USE_COLOR = True

# p-adic precision
DEFAULT_PRECISION = 40  # absolute precision M, elements are known mod p^M
PRECISION_ENV_VAR = "ORBITLAB_PRECISION"
GUARD_DIGITS = 4  # digits held back when declaring something zero at precision
MAX_PRECISION = 2000

# Tate series
DEFAULT_TRUNCATION = 24  # total degree T
DEFAULT_RHO_STEPS = 64   # n_max for iterated pullback norms

# Exact arithmetic limits
ROOT_EPSILON = 1e-9     # archimedean decision margin
ROOT_DPS = 60           # working decimal digits for certified complex roots
ROOT_MAX_DPS = 480
PRIMITIVE_K_MAX = 32    # integer shifts tried for a + k*b
FACTOR_DEGREE_CAP = 16
FIELD_DEGREE_CAP = 64
HEIGHT_BITS_CAP = 200000  # coordinate blowup cap for forward orbits

# Dynamics bounds
N_BOUND = 64            # critical orbit iteration cap
N_DIRECT = 500          # direct return-time search
DIRECT_EXACT_BITS = 4096  # exact orbit arithmetic window before the modular sieve
T_ARC = 16              # difference-operator truncation for arcs
M_MAX = 10 ** 4         # cap on the periodic-residue order m
HEIGHT_GROWTH_STEPS = 8
INDEPENDENCE_BOUND = 24  # B
GOOD_PRIME_MAX = 50
BIDEGREE_CAP = 6
CURVE_ANCHOR_DEPTH = 2   # backward layers above the fixed points used as interpolation anchors
CURVE_ANCHOR_CAP = 24    # anchors kept per factor
CURVE_NODE_BUDGET = 5000  # fiber assignments tried per bidegree
CURVE_DPS = 40
MODULAR_CHECK_PRIMES = (2305843009213693951, 4611686018427387847, 9223372036854775783)

# Default seed for any randomized sampling
DEFAULT_SEED = 20240917

# Output settings
OUTPUT_FORMAT = "pretty"  # Options: pretty, json

# Logging settings
LOG_LEVEL = "INFO"  # Options: DEBUG, INFO, WARNING, ERROR, CRITICAL
LOG_TO_FILE = False  # Enable logging to file
LOG_FILE_PATH = "orbitlab.log"  # Log file path when LOG_TO_FILE is True
LOG_MAX_SIZE_MB = 10  # Maximum log file size before rotation
LOG_BACKUP_COUNT = 3  # Number of backup log files to keep


def resolve_precision(override=None) -> int:
    """
    Resolve the working p-adic precision.

    Args:
        override: Explicit precision (flag or manifest), wins when given

    Returns:
        Absolute precision M
    """
    if override is not None:
        return int(override)
    env_value = os.environ.get(PRECISION_ENV_VAR)
    if env_value:
        return int(env_value)
    return DEFAULT_PRECISION

"""
Configuration settings for the LQ Stackelberg Solver
"""

import os
from pathlib import Path

from exceptions import ConfigurationError


def _float_setting(key: str, default: float) -> float:
    """Read a float setting from the environment."""
    raw = os.getenv(key)
    if raw is None:
        return default
    try:
        return float(raw)
    except ValueError:
        raise ConfigurationError(f"Setting {key} must be a number, got '{raw}'", config_key=key)


def _int_setting(key: str, default: int) -> int:
    """Read an integer setting from the environment."""
    raw = os.getenv(key)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigurationError(f"Setting {key} must be an integer, got '{raw}'", config_key=key)


# Application settings
APP_NAME = "LQ Stackelberg Solver"
APP_VERSION = "1.0.0"

# Factorization thresholds
SINGULAR_RTOL = _float_setting("LQS_SINGULAR_RTOL", 1e-12)
PD_RTOL = _float_setting("LQS_PD_RTOL", 1e-12)
PSD_TOL = _float_setting("LQS_PSD_TOL", 1e-10)
SYMMETRY_TOL = _float_setting("LQS_SYMMETRY_TOL", 1e-10)
UNIQUENESS_RTOL = _float_setting("LQS_UNIQUENESS_RTOL", 1e-10)

# Verification thresholds
CONSISTENCY_TOL = _float_setting("LQS_CONSISTENCY_TOL", 1e-6)
DEVIATION_TOL = _float_setting("LQS_DEVIATION_TOL", 1e-8)
VARIATION_TOL = _float_setting("LQS_VARIATION_TOL", 1e-8)
COSTATE_TOL = _float_setting("LQS_COSTATE_TOL", 1e-10)
STATIONARITY_TOL = _float_setting("LQS_STATIONARITY_TOL", 1e-9)
ADJOINT_TOL = _float_setting("LQS_ADJOINT_TOL", 1e-8)
RESPONSE_TOL = _float_setting("LQS_RESPONSE_TOL", 1e-9)
FIXED_POINT_TOL = _float_setting("LQS_FIXED_POINT_TOL", 1e-12)

# Probing
FD_STEP = _float_setting("LQS_FD_STEP", 1e-5)
PROBE_SCALE = _float_setting("LQS_PROBE_SCALE", 0.1)
DEFAULT_PROBES = _int_setting("LQS_DEFAULT_PROBES", 20)
DEFAULT_SEED = _int_setting("LQS_DEFAULT_SEED", 0)
EPS_MIN = 1e-4
EPS_MAX = 1e-1
FIXED_POINT_MAX_ITER = _int_setting("LQS_FIXED_POINT_MAX_ITER", 500)

# Reporting
DISPLAY_DECIMALS = 4

# Directory paths
BASE_DIR = Path(__file__).parent
FIXTURES_DIR = BASE_DIR / "fixtures"

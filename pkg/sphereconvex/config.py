"""
Runtime settings for sphereconvex.

Every tunable is read once from the environment (or a local .env file) and
exposed as a module-level constant.
"""
import os
import logging
from typing import List

from dotenv import load_dotenv

# Load environment variables
load_dotenv()


def _env_float(name: str, default: str) -> float:
    return float(os.getenv(name, default))


def _env_int(name: str, default: str) -> int:
    return int(os.getenv(name, default))


# ==================== Storage ====================

DATA_DIR = os.getenv("SPHERECONVEX_DATA_DIR", "./data/runs")

# ==================== Numerics ====================

# Resolution level used when a caller does not pick one
DEFAULT_RESOLUTION = _env_int("SPHERECONVEX_RESOLUTION", "4")
# Inequality slack added on top of propagated error bars
DEFAULT_TOLERANCE = _env_float("SPHERECONVEX_TOL", "1e-8")

# C2+ audit: grid density relative to the quadrature and eigenvalue floor (relative to h)
AUDIT_DENSITY_FACTOR = _env_int("SPHERECONVEX_AUDIT_DENSITY", "4")
AUDIT_EIGEN_FLOOR = _env_float("SPHERECONVEX_AUDIT_EIGEN_FLOOR", "1e-8")

# Refit bandwidths for polar, dual and recentered bodies
REFIT_BANDWIDTH_FACTOR = _env_int("SPHERECONVEX_REFIT_FACTOR", "2")
MIN_BANDWIDTH_2D = _env_int("SPHERECONVEX_MIN_BANDWIDTH_2D", "64")
MAX_BANDWIDTH_2D = _env_int("SPHERECONVEX_MAX_BANDWIDTH_2D", "256")
MIN_BANDWIDTH_3D = _env_int("SPHERECONVEX_MIN_BANDWIDTH_3D", "12")
MAX_BANDWIDTH_3D = _env_int("SPHERECONVEX_MAX_BANDWIDTH_3D", "20")
MIN_BANDWIDTH_AXIAL = _env_int("SPHERECONVEX_MIN_BANDWIDTH_AXIAL", "32")
FIT_TOLERANCE = _env_float("SPHERECONVEX_FIT_TOL", "1e-6")

# Embedded second fundamental form
FD_STEP = _env_float("SPHERECONVEX_FD_STEP", "1e-4")

# Radial refinement
RADIAL_TOL = _env_float("SPHERECONVEX_RADIAL_TOL", "1e-13")
RADIAL_MAX_ITER = _env_int("SPHERECONVEX_RADIAL_MAX_ITER", "60")

# Centers
GHS_TOLERANCE = _env_float("SPHERECONVEX_GHS_TOL", "1e-8")
GHS_MAX_ITER = _env_int("SPHERECONVEX_GHS_MAX_ITER", "30")

# ==================== Scans ====================

SCAN_CHECKPOINT_EVERY = _env_int("SPHERECONVEX_CHECKPOINT_EVERY", "25")
DEFAULT_THREADS = _env_int("SPHERECONVEX_THREADS", "1")

# ==================== Service ====================

CORS_ORIGINS_ENV = os.getenv("CORS_ORIGINS", "http://localhost:3000")
# Handle wildcard for development
if CORS_ORIGINS_ENV == "*":
    CORS_ORIGINS: List[str] = ["*"]
else:
    CORS_ORIGINS = CORS_ORIGINS_ENV.split(",")

APP_HOST = os.getenv("APP_HOST", "0.0.0.0")
APP_PORT = _env_int("APP_PORT", "8000")

LOG_LEVEL = os.getenv("SPHERECONVEX_LOG_LEVEL", "INFO")

_logging_ready = False


def setup_logging(level: str = None) -> None:
    """
    Install the package log handler.

    Args:
        level: Level name; defaults to SPHERECONVEX_LOG_LEVEL
    """
    global _logging_ready
    logger = logging.getLogger("sphereconvex")
    logger.setLevel((level or LOG_LEVEL).upper())
    if _logging_ready:
        return
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter("[%(name)s] %(levelname)s %(message)s"))
    logger.addHandler(handler)
    logger.propagate = False
    _logging_ready = True


def settings_snapshot() -> dict:
    """Return the numeric settings as a plain dict (echoed into run manifests)."""
    return {
        "default_resolution": DEFAULT_RESOLUTION,
        "default_tolerance": DEFAULT_TOLERANCE,
        "audit_density_factor": AUDIT_DENSITY_FACTOR,
        "audit_eigen_floor": AUDIT_EIGEN_FLOOR,
        "refit_bandwidth_factor": REFIT_BANDWIDTH_FACTOR,
        "min_bandwidth_2d": MIN_BANDWIDTH_2D,
        "min_bandwidth_3d": MIN_BANDWIDTH_3D,
        "min_bandwidth_axial": MIN_BANDWIDTH_AXIAL,
        "fit_tolerance": FIT_TOLERANCE,
        "fd_step": FD_STEP,
        "radial_tol": RADIAL_TOL,
        "ghs_tolerance": GHS_TOLERANCE,
        "scan_checkpoint_every": SCAN_CHECKPOINT_EVERY,
    }

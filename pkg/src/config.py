import logging
import os
import sys
from dotenv import load_dotenv

# Load environment configuration
load_dotenv()

# Diagnostics
LOG_LEVELS = {
    'error': logging.ERROR,
    'info': logging.INFO,
    'debug': logging.DEBUG,
}
LOG_NAME = os.getenv('RSL_LOG', 'error').strip().lower()

# Runtime configuration
JOBS = int(os.getenv('RSL_JOBS', '0'))
REL_TOL = float(os.getenv('RSL_REL_TOL', '1e-10'))
ABS_TOL = float(os.getenv('RSL_ABS_TOL', '1e-12'))
SEED = int(os.getenv('RSL_SEED', '20240601'))

# Integrator limits
MIN_STEP = 1e-14
BLOW_UP_NORM = 1e12
MAX_STEPS = 200_000
EVENT_XTOL = 1e-12

# Shooting
EPS_LADDER = (1e-2, 1e-3, 1e-4, 1e-5)
SEED_OFFSET = 1e-6
SEED_OMEGA = 1e-3
GAP_TOL = 1e-3
ORDER_FLOOR = 1e-9
SAMPLE_DT = 0.025
MAX_SAMPLES = 40_000
ANCHOR_WINDOW = 0.05
ANCHOR_TOL = 1e-3

# Default spans of the phase variable (|y| or z) per regime
SPAN_CASE1 = 400.0
SPAN_CASE1_NEGATIVE = 1000.0
SPAN_CIGAR = 300.0
SPAN_CASE2 = 400.0
FAMILY_GRID_START = 1e-2

# Geometry
TIP_SINGULAR = 1e-12
TIP_CLEARANCE = 0.1
RESIDUAL_TOL = 1e-6
IDENTITY_TOL = 1e-5
GAUSS_TOL = 1e-8

# Asymptotics
TAIL_FRACTION = 0.25
TAIL_SENSITIVITY = (0.15, 0.35)
OMEGA_EXP_TOL = 0.02
F_EXP_TOL = 0.05
VOL_EXP_TOL = 0.05
CIGAR_FLATNESS = 0.01
LIMIT_TOL = 0.05
LIMIT_MIN_TAIL = 10

# Potential theory
ND_THRESHOLD = 1e-10
GENERIC_FRACTION = 0.95
GENERIC_DRAWS = 200


def get_log_level():
    """Returns the logging level selected by RSL_LOG"""
    if LOG_NAME not in LOG_LEVELS:
        raise ValueError(f"RSL_LOG must be one of {sorted(LOG_LEVELS)}, got {LOG_NAME!r}")
    return LOG_LEVELS[LOG_NAME]


def get_jobs(requested=None):
    """Returns the worker count for ε-family fan-out"""
    jobs = requested if requested is not None else JOBS
    if jobs <= 0:
        jobs = os.cpu_count() or 1
    return jobs


def setup_logging(level=None):
    """Send diagnostics to standard error at the configured level"""
    logging.basicConfig(
        level=level if level is not None else get_log_level(),
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
        stream=sys.stderr,
        force=True,
    )

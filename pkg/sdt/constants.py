""" Constants for sdt.

Generally contains numerical defaults, file format names and preset parameters.
"""
import math
from typing import Dict, Tuple

# functional constants
SQRT2 = math.sqrt(2.0)
TWO_PI = 2.0 * math.pi

DEFAULT_BETA = 3.0
DEFAULT_M_POINTS = 100
DEFAULT_K_CAP = 200

# identifiability: the search interval may not be wider than half a period
MAX_GRID_DIAMETER = 0.5
MIN_GRID_POINTS = 3
MIN_SAMPLES = 4

HALF_SINE_TRUNCATION = 1e-12
SYMMETRY_CHECK_POINTS = 1024
SYMMETRY_RELATIVE_TOLERANCE = 1e-9
QUADRATURE_POINTS = 4096

KERNEL_CHECK_NODES = 100_000
KERNEL_CHECK_TOLERANCE = 1e-6
GAUSSIAN_CHECK_HALF_WIDTH = 8.0

DENSITY_GRID_POINTS = 201
DENSITY_GRID_PADDING = 3.0  # in bandwidths
LSCV_QUADRATURE_PADDING = 4.0  # in bandwidths
LSCV_QUADRATURE_POINTS = 4001
MODE_RELATIVE_THRESHOLD = 0.1
MODE_PROMINENCE = 1.0 / 3.0  # fraction of the density maximum

DEVIATION_LEVELS: Tuple[float, ...] = (2.0, 3.0, 4.0)

# independent random streams, combined with a seed and an index
SHIFT_STREAM = 0
NOISE_STREAM = 1
REPLICATE_STREAM = 2

# shift distribution variants
UNIFORM = "uniform"
COSINE_BUMP = "cosine-bump"
BIMODAL = "bimodal-cosine-mixture"
POINT_MASS = "point-mass"

# filter kinds
PINSKER = "pinsker"
PROJECTION = "projection"
CUSTOM = "custom"

# kernels
GAUSSIAN = "gaussian"
EPANECHNIKOV = "epanechnikov"

# hull termination reasons
REACHED_K_MAX = "reached K_max"
NONPOSITIVE_SLOPE = "nonpositive slope"
# selected K is the voting vertex still entered at this multiple of the final hull slope
SLOPE_HEURISTIC_FACTOR = 2.0

# signal presets
SINGLE_HARMONIC = "single-harmonic"
HALF_SINE = "half-sine"
LASER = "laser"

BIMODAL_CENTERS = (-0.1, 0.1)
BIMODAL_HALF_WIDTH = 0.08

LASER_FREQUENCY = 100.0
LASER_CENTER = 0.35
LASER_ACCEPTANCE_AMPLITUDE = 1.0
LASER_DEMO_AMPLITUDE = 0.015

# simulation presets used by the command line and the bench suites
PRESETS: Dict[str, Dict[str, object]] = {
    "sim1": {
        "signal": HALF_SINE,
        "dist": "bimodal",
        "n": 100,
        "J": 50,
        "sigma": 0.1,
    },
    "sim2": {
        "signal": LASER,
        "amplitude": 1.0,
        "center": LASER_CENTER,
        "dist": "bump:0:0.1",
        "n": 100,
        "J": 30,
        "sigma": 0.1,
        "tau_min": 0.1,
        "tau_max": 0.6,
    },
    "illustration": {
        "signal": LASER,
        "amplitude": LASER_DEMO_AMPLITUDE,
        "center": 0.0,
        "dist": f"point:{LASER_CENTER}",
        "n": 800,
        "J": 1,
        "sigma": 1.0,
        "tau_min": 0.25,
        "tau_max": 0.75,
    },
}

# csv formats
TIME_COLUMN = "t"
CURVE_COLUMN_PREFIX = "curve_"
TRUE_SHIFTS_COLUMNS = ("curve_id", "theta_true")
ESTIMATED_SHIFTS_COLUMNS = (
    "curve_id",
    "theta_hat",
    "K_selected",
    "M_max",
    "degenerate_flag",
)
DENSITY_COLUMNS = ("x", "phi_hat")
BENCH_COLUMNS = ("suite", "metric", "value", "threshold", "status")
TIME_TOLERANCE = 1e-9

PASS = "PASS"
FAIL = "FAIL"
INFO = "INFO"

# exit codes
EXIT_OK = 0
EXIT_BENCH_FAILURE = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DATA = 4

""" Run configuration, read from an INI file such as config.ini. """

import configparser
import dataclasses
import logging
import pathlib
import re
from typing import Callable, Dict, Optional, Tuple

from . import constants, density_estimation, shift_estimation, spectral
from .errors import ConfigError, InvalidArgumentError

logger = logging.getLogger(__name__)

# default values
TAU_MIN = -0.25
TAU_MAX = 0.25
M_POINTS = constants.DEFAULT_M_POINTS

K_MAX = constants.DEFAULT_K_CAP
BETA = constants.DEFAULT_BETA
REFINE = False
ALPHA0_CAP: Optional[float] = None

KERNEL = constants.EPANECHNIKOV
BANDWIDTH = "lscv:0.005:0.2:30"

N_SAMPLES: Optional[int] = None
SIGMA = 0.1
SEED = 0

PANEL_PATH = "panel.csv"
SHIFTS_PATH = "shifts.csv"
ESTIMATES_PATH = "estimates.csv"
DENSITY_PATH = "density.csv"
BENCH_PATH = "bench.csv"

WORKERS = 1


@dataclasses.dataclass(frozen=True)
class RunConfig:
    tau_min: float = TAU_MIN
    tau_max: float = TAU_MAX
    m_points: int = M_POINTS
    K_max: int = K_MAX
    beta: float = BETA
    refine: bool = REFINE
    alpha0_cap: Optional[float] = ALPHA0_CAP
    kernel: str = KERNEL
    bandwidth: str = BANDWIDTH
    n_samples: Optional[int] = N_SAMPLES
    sigma: float = SIGMA
    seed: int = SEED
    panel_path: str = PANEL_PATH
    shifts_path: str = SHIFTS_PATH
    estimates_path: str = ESTIMATES_PATH
    density_path: str = DENSITY_PATH
    bench_path: str = BENCH_PATH
    workers: int = WORKERS

    def tau_grid(self) -> shift_estimation.TauGrid:
        return shift_estimation.TauGrid(self.tau_min, self.tau_max, self.m_points)

    def estimation_config(self, n: int) -> shift_estimation.EstimationConfig:
        """The pipeline settings for curves of n samples; K runs over 1..min(K_MAX, floor((n-1)/2))."""
        K_top = min(self.K_max, spectral.nyquist_bound(n))
        if K_top < 1:
            raise InvalidArgumentError(f"curves of {n} samples leave no admissible filter length")
        return shift_estimation.EstimationConfig(
            tau_grid=self.tau_grid(),
            K_grid=tuple(range(1, K_top + 1)),
            beta=self.beta,
            refine=self.refine,
            alpha0_cap=self.alpha0_cap,
        )

    def kernel_object(self) -> density_estimation.Kernel:
        return density_estimation.get_kernel(self.kernel)

    def bandwidth_policy(self) -> density_estimation.BandwidthPolicy:
        return density_estimation.parse_bandwidth_policy(self.bandwidth)


def _optional(parse: Callable[[str], object]) -> Callable[[str], object]:
    def parse_optional(text: str):
        if text.strip().lower() in ("", "none"):
            return None
        return parse(text)

    return parse_optional


def _boolean(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in configparser.ConfigParser.BOOLEAN_STATES:
        return configparser.ConfigParser.BOOLEAN_STATES[lowered]
    raise ValueError(f"not a boolean: {text!r}")


# (section, key) -> (RunConfig field, parser)
_SCHEMA: Dict[Tuple[str, str], Tuple[str, Callable[[str], object]]] = {
    ("GRID", "TAU_MIN"): ("tau_min", float),
    ("GRID", "TAU_MAX"): ("tau_max", float),
    ("GRID", "M_POINTS"): ("m_points", int),
    ("FILTER", "K_MAX"): ("K_max", int),
    ("FILTER", "BETA"): ("beta", float),
    ("FILTER", "REFINE"): ("refine", _boolean),
    ("FILTER", "ALPHA0_CAP"): ("alpha0_cap", _optional(float)),
    ("DENSITY", "KERNEL"): ("kernel", str.strip),
    ("DENSITY", "BANDWIDTH"): ("bandwidth", str.strip),
    ("SIMULATION", "N_SAMPLES"): ("n_samples", _optional(int)),
    ("SIMULATION", "SIGMA"): ("sigma", float),
    ("SIMULATION", "SEED"): ("seed", int),
    ("OUTPUT", "PANEL_PATH"): ("panel_path", str.strip),
    ("OUTPUT", "SHIFTS_PATH"): ("shifts_path", str.strip),
    ("OUTPUT", "ESTIMATES_PATH"): ("estimates_path", str.strip),
    ("OUTPUT", "DENSITY_PATH"): ("density_path", str.strip),
    ("OUTPUT", "BENCH_PATH"): ("bench_path", str.strip),
    ("RUNTIME", "WORKERS"): ("workers", int),
}


def _key_lines(text: str) -> Dict[Tuple[str, str], int]:
    """1-based line of every key, by (SECTION, KEY)."""
    lines: Dict[Tuple[str, str], int] = {}
    section = None
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        header = re.match(r"^\[([^\]]+)\]$", stripped)
        if header:
            section = header.group(1).strip().upper()
            continue
        key = re.match(r"^([^=:#;\s][^=:]*?)\s*[=:]", stripped)
        if key and section is not None:
            lines.setdefault((section, key.group(1).strip().upper()), number)
    return lines


def _validate(values: Dict[str, object]) -> Optional[Tuple[str, str]]:
    """Returns (field, message) for the first invalid value, None when all are valid."""
    if not values["tau_max"] > values["tau_min"]:
        return "tau_max", "TAU_MAX must exceed TAU_MIN"
    if values["tau_max"] - values["tau_min"] > constants.MAX_GRID_DIAMETER + 1e-12:
        return "tau_max", "TAU_MAX - TAU_MIN must be <= 0.5"
    if values["m_points"] < constants.MIN_GRID_POINTS:
        return "m_points", f"M_POINTS must be >= {constants.MIN_GRID_POINTS}"
    if values["K_max"] < 1:
        return "K_max", "K_MAX must be >= 1"
    if not values["beta"] > 0:
        return "beta", "BETA must be > 0"
    if values["alpha0_cap"] is not None and not values["alpha0_cap"] > 1:
        return "alpha0_cap", "ALPHA0_CAP must be > 1 or empty"
    if values["kernel"] not in density_estimation.KERNELS:
        return "kernel", f"KERNEL must be one of {sorted(density_estimation.KERNELS)}"
    try:
        density_estimation.parse_bandwidth_policy(values["bandwidth"])
    except InvalidArgumentError as error:
        return "bandwidth", str(error)
    if values["n_samples"] is not None and values["n_samples"] < constants.MIN_SAMPLES:
        return "n_samples", f"N_SAMPLES must be >= {constants.MIN_SAMPLES}"
    if not values["sigma"] >= 0:
        return "sigma", "SIGMA must be >= 0"
    if values["seed"] < 0:
        return "seed", "SEED must be >= 0"
    if values["workers"] < 1:
        return "workers", "WORKERS must be >= 1"
    return None


def load_config(config_path: Optional[str]) -> RunConfig:
    """Reads and validates a configuration file.

    Keys that are absent keep their defaults. A missing file yields the defaults.

    Args:
        config_path: Path of the INI file, or None.

    Returns:
        The validated RunConfig.

    Raises:
        ConfigError: An unknown key or an invalid value; the message names the
            file and the line of the offending key.
    """
    if config_path is None:
        return RunConfig()
    path = pathlib.Path(config_path)
    if not path.exists():
        logger.warning("%s does not exist; using default configuration", path)
        return RunConfig()

    text = path.read_text(encoding="utf-8")
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as error:
        raise ConfigError(str(error).splitlines()[0], str(path), getattr(error, "lineno", None)) from None

    lines = _key_lines(text)
    values = dataclasses.asdict(RunConfig())
    field_lines: Dict[str, int] = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            location = (section.upper(), key.upper())
            line = lines.get(location)
            if location not in _SCHEMA:
                raise ConfigError(f"unknown key {key.upper()} in [{section}]", str(path), line)
            field, parse = _SCHEMA[location]
            try:
                values[field] = parse(raw)
            except ValueError:
                raise ConfigError(f"invalid value {raw!r} for {key.upper()}", str(path), line) from None
            if line is not None:
                field_lines[field] = line

    problem = _validate(values)
    if problem is not None:
        field, message = problem
        raise ConfigError(message, str(path), field_lines.get(field))
    logger.debug("loaded configuration from %s", path)
    return RunConfig(**values)

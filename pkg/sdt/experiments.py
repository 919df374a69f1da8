""" Monte-Carlo harness for the shift and density estimators.

Replicates are independent: replicate r draws its curves from a seed derived
from (master seed, stream, r), so reports do not depend on the number of
worker threads.
"""

import dataclasses
import logging
import math
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate
from tqdm import tqdm

from . import constants, density_estimation, filters, shift_estimation, signal_model, utils
from .errors import InvalidArgumentError, SdtError
from .filters import Filter

logger = logging.getLogger(__name__)


def preset_signal(
    name: str, amplitude: float = constants.LASER_ACCEPTANCE_AMPLITUDE, center: float = 0.0
) -> signal_model.Signal:
    if name == constants.SINGLE_HARMONIC:
        return signal_model.single_harmonic_signal()
    if name == constants.HALF_SINE:
        return signal_model.half_sine_signal()
    if name == constants.LASER:
        return signal_model.laser_signal(amplitude, constants.LASER_FREQUENCY, center)
    raise InvalidArgumentError(
        f"unknown signal {name!r}; expected one of "
        f"{[constants.SINGLE_HARMONIC, constants.HALF_SINE, constants.LASER]}"
    )


@dataclasses.dataclass(frozen=True, eq=False)
class McConfig:
    """One Monte-Carlo experiment.

    Attributes:
        signal: The common signal.
        dist: Law of the shifts.
        n: Samples per curve.
        sigma: Noise level.
        replicates: Number of replicates R.
        tau_grid: Candidate shifts.
        seed: Master seed.
        J: Curves per replicate (density experiments; shift experiments use one).
        weight_filter: Fixed filter; None runs the adaptive pipeline.
        refine: Parabolic refinement of the grid estimate.
        beta: Pinsker exponent of the adaptive pipeline.
        K_grid: Filter lengths of the adaptive pipeline; empty means the default.
        alpha0_cap: See EstimationConfig.
        workers: Threads over replicates.
        progress: Show a progress bar.
    """

    signal: signal_model.Signal
    dist: signal_model.ShiftDistribution
    n: int
    sigma: float
    replicates: int
    tau_grid: shift_estimation.TauGrid
    seed: int = 0
    J: int = 1
    weight_filter: Optional[Filter] = None
    refine: bool = False
    beta: float = constants.DEFAULT_BETA
    K_grid: Tuple[int, ...] = ()
    alpha0_cap: Optional[float] = None
    workers: int = 1
    progress: bool = False

    def __post_init__(self):
        if self.replicates < 1:
            raise InvalidArgumentError("at least one replicate is required")
        if self.n < constants.MIN_SAMPLES or self.J < 1:
            raise InvalidArgumentError("n >= 4 and J >= 1 are required")
        if self.sigma < 0:
            raise InvalidArgumentError("sigma must be >= 0")

    def estimation_config(self) -> shift_estimation.EstimationConfig:
        return shift_estimation.EstimationConfig(
            tau_grid=self.tau_grid,
            K_grid=tuple(self.K_grid),
            beta=self.beta,
            refine=self.refine,
            alpha0_cap=self.alpha0_cap,
        )


def _replicates(config: McConfig, description: str):
    items = range(config.replicates)
    if config.progress:
        return tqdm(items, desc=description)
    return items


def estimate_locations(config: McConfig, panel: signal_model.CurvePanel) -> np.ndarray:
    """theta_hat for every curve of a panel, NaN where estimation failed."""
    if config.weight_filter is None:
        estimates = shift_estimation.estimate_shifts_panel(panel, config.estimation_config())
        return np.array([estimate.theta_hat for estimate in estimates])
    return np.array(
        [
            shift_estimation.estimate_shift_fixed_filter(
                row, config.weight_filter, config.tau_grid, config.refine
            )
            for row in panel.values
        ]
    )


def compute_Rn(
    weight_filter: Filter, signal: signal_model.Signal, n: int, sigma: float = 1.0
) -> float:
    """sum_k (2 pi k)^2 [(1 - h_k)^2 f_k^2 + h_k^2 sigma^2 / n] up to max(filter support, signal cutoff)."""
    if n < 1:
        raise InvalidArgumentError("n must be >= 1")
    cutoff = signal_model.sampled_to_cosine(signal).cutoff
    width = max(weight_filter.support, cutoff)
    if width == 0:
        return 0.0
    weights = weight_filter.padded(width)
    coefficients = signal_model.signal_coefficients(signal, width)
    frequencies = constants.TWO_PI * np.arange(1, width + 1)
    terms = (1.0 - weights) ** 2 * coefficients ** 2 + weights ** 2 * sigma ** 2 / n
    return float(np.sum(frequencies ** 2 * terms))


@dataclasses.dataclass(frozen=True, eq=False)
class McShiftReport:
    """Accuracy of the shift estimator over R replicates.

    Attributes:
        errors: theta_hat - theta per replicate (NaN for failed replicates).
        bias: Mean error.
        mse: Mean squared error.
        sd: Sample standard deviation of the errors.
        normalized_risk: n ||f'||^2 MSE / sigma^2.
        predicted_risk: 1 + R_n / ||f'||^2 for a fixed filter, NaN otherwise.
        tail_frequencies: For each level K, the frequency of
            sqrt(n) ||f'|| |theta_hat - theta| / sigma > K sqrt(log n).
        bias_bound: 2 log(n)/n + 3 sd / sqrt(R).
        failures: Number of failed replicates.
    """

    errors: np.ndarray
    bias: float
    mse: float
    sd: float
    normalized_risk: float
    predicted_risk: float
    tail_frequencies: Dict[float, float]
    bias_bound: float
    failures: int


def run_mc_shift(config: McConfig) -> McShiftReport:
    """R replicates of one curve each: draw theta, simulate, estimate, compare."""
    deriv_norm_sq = signal_model.signal_class_diagnostics(config.signal).deriv_norm_sq

    def replicate(r: int) -> float:
        seed = utils.derive_seed(config.seed, constants.REPLICATE_STREAM, r)
        try:
            panel = signal_model.generate_panel(
                config.signal, config.dist, config.sigma, config.n, 1, seed
            )
            return float(estimate_locations(config, panel)[0] - panel.target_locations[0])
        except (SdtError, FloatingPointError, ValueError) as error:
            logger.warning("replicate %d failed: %s", r, error)
            return math.nan

    errors = np.array(
        utils.parallel_map(replicate, _replicates(config, "shift replicates"), config.workers)
    )
    finite = errors[np.isfinite(errors)]
    failures = len(errors) - len(finite)
    if failures:
        logger.warning("%d of %d replicates failed", failures, len(errors))
    if len(finite) == 0:
        raise SdtError("every replicate failed")

    bias = float(np.mean(finite))
    mse = float(np.mean(finite ** 2))
    sd = float(np.std(finite, ddof=1)) if len(finite) > 1 else 0.0
    n = config.n
    noise_sq = config.sigma ** 2
    normalized_risk = n * deriv_norm_sq * mse / noise_sq if noise_sq > 0 else math.nan
    predicted = math.nan
    if config.weight_filter is not None and deriv_norm_sq > 0:
        rn = compute_Rn(config.weight_filter, config.signal, n, config.sigma if noise_sq else 1.0)
        predicted = 1.0 + rn / deriv_norm_sq

    scale = math.sqrt(n * deriv_norm_sq) / config.sigma if config.sigma > 0 else math.inf
    tails = {
        level: float(np.mean(scale * np.abs(finite) > level * math.sqrt(math.log(n))))
        for level in constants.DEVIATION_LEVELS
    }
    return McShiftReport(
        errors=errors,
        bias=bias,
        mse=mse,
        sd=sd,
        normalized_risk=normalized_risk,
        predicted_risk=predicted,
        tail_frequencies=tails,
        bias_bound=2.0 * math.log(n) / n + 3.0 * sd / math.sqrt(len(finite)),
        failures=failures,
    )


@dataclasses.dataclass(frozen=True, eq=False)
class McDensityReport:
    """Accuracy of the density estimator across a sweep of J.

    Each array is indexed like J_sweep. mode_counts has shape (len(J_sweep), R)
    with -1 for failed replicates.
    """

    J_sweep: Tuple[int, ...]
    mise: np.ndarray
    pointwise_mse: np.ndarray
    mode_counts: np.ndarray
    bandwidths: np.ndarray
    slope: float
    failures: int

    def mode_rate(self, count: int, index: int = 0) -> float:
        """Fraction of replicates at sweep position `index` with exactly `count` modes."""
        return float(np.mean(self.mode_counts[index] == count))


def _evaluation_grid(dist: signal_model.ShiftDistribution) -> np.ndarray:
    low, high = dist.support
    margin = 0.1
    return np.linspace(low - margin, high + margin, 401)


def run_mc_density(
    config: McConfig,
    kernel: density_estimation.Kernel,
    policy: density_estimation.BandwidthPolicy,
    J_sweep: Sequence[int],
) -> McDensityReport:
    """For every J of the sweep: panel -> shifts -> kernel estimate, R times.

    MISE and the pointwise MSE at the true modes are computed against the
    closed-form density; they are NaN for a point mass.
    """
    J_values = tuple(int(J) for J in J_sweep)
    if not J_values or any(b <= a for a, b in zip(J_values, J_values[1:])):
        raise InvalidArgumentError("J_sweep must be nonempty and increasing")
    axis = config.signal.axis
    grid = _evaluation_grid(config.dist)
    continuous = config.dist.kind != constants.POINT_MASS
    truth = signal_model.shift_pdf(config.dist, grid) if continuous else None
    modes = np.asarray(config.dist.modes, dtype=float)
    true_at_modes = signal_model.shift_pdf(config.dist, modes) if continuous else None

    def replicate(J: int, r: int):
        seed = utils.derive_seed(config.seed, constants.REPLICATE_STREAM, J, r)
        try:
            panel = signal_model.generate_panel(
                config.signal, config.dist, config.sigma, config.n, J, seed
            )
            shifts = estimate_locations(config, panel) - axis
            shifts = shifts[np.isfinite(shifts)]
            h = density_estimation.select_bandwidth(policy, shifts, kernel, config.n)
            estimate = density_estimation.kde(shifts, kernel, h, grid)
        except (SdtError, FloatingPointError, ValueError) as error:
            logger.warning("density replicate J=%d r=%d failed: %s", J, r, error)
            return None
        count = density_estimation.count_modes(estimate)
        if not continuous:
            return math.nan, math.nan, count, h
        ise = float(integrate.trapezoid((estimate.values - truth) ** 2, grid))
        at_modes = density_estimation.kde(shifts, kernel, h, modes).values
        return ise, float(np.mean((at_modes - true_at_modes) ** 2)), count, h

    mise, pointwise, counts, bandwidths = [], [], [], []
    failures = 0
    for J in J_values:
        results = utils.parallel_map(
            lambda r, J=J: replicate(J, r),
            _replicates(config, f"density replicates J={J}"),
            config.workers,
        )
        succeeded = [result for result in results if result is not None]
        failures += len(results) - len(succeeded)
        counts.append([result[2] if result is not None else -1 for result in results])
        if succeeded:
            values = np.array(succeeded, dtype=float)
            mise.append(float(np.mean(values[:, 0])))
            pointwise.append(float(np.mean(values[:, 1])))
            bandwidths.append(float(np.mean(values[:, 3])))
        else:
            mise.append(math.nan)
            pointwise.append(math.nan)
            bandwidths.append(math.nan)
        logger.info("J=%d: MISE=%g pointwise MSE=%g", J, mise[-1], pointwise[-1])

    pointwise_array = np.array(pointwise)
    slope = math.nan
    if len(J_values) >= 2 and np.all(pointwise_array > 0):
        slope = float(np.polyfit(np.log(J_values), np.log(pointwise_array), 1)[0])
    return McDensityReport(
        J_sweep=J_values,
        mise=np.array(mise),
        pointwise_mse=pointwise_array,
        mode_counts=np.array(counts, dtype=int),
        bandwidths=np.array(bandwidths),
        slope=slope,
        failures=failures,
    )


def true_expectation(dist: signal_model.ShiftDistribution, g: Callable) -> float:
    """mu g, by quadrature against the closed-form density (g(c) for a point mass)."""
    if dist.kind == constants.POINT_MASS:
        return float(g(np.asarray(dist.centers[0])))
    # mixture components are single cosine bumps
    kind = constants.UNIFORM if dist.kind == constants.UNIFORM else constants.COSINE_BUMP
    total = 0.0
    for center, half_width, weight in zip(dist.centers, dist.half_widths, dist.weights):
        component = signal_model.ShiftDistribution(kind, (center,), (half_width,), (1.0,))
        value, _ = integrate.quad(
            lambda x, component=component: float(g(np.asarray(x)))
            * float(signal_model.shift_pdf(component, x)),
            center - half_width,
            center + half_width,
            limit=200,
        )
        total += weight * value
    return total


def run_consistency_check(config: McConfig, g: Callable, estimated: bool = True) -> float:
    """|mu_hat g - mu g| for one panel of config.J curves.

    Args:
        config: The experiment; replicates is ignored.
        g: Test function, vectorized.
        estimated: Use estimated shifts; False plugs in the true shifts.
    """
    panel = signal_model.generate_panel(
        config.signal, config.dist, config.sigma, config.n, config.J, config.seed, config.workers
    )
    if estimated:
        shifts = estimate_locations(config, panel) - panel.axis
        shifts = shifts[np.isfinite(shifts)]
    else:
        shifts = np.asarray(panel.shifts)
    plug_in = density_estimation.empirical_measure_apply(shifts, g)
    return abs(plug_in - true_expectation(config.dist, g))


def default_lemma24_config(replicates: int = 1000, seed: int = 0, workers: int = 1) -> McConfig:
    """Single harmonic, n = 800, sigma = 1, projection filter N = 5 with refinement."""
    return McConfig(
        signal=signal_model.single_harmonic_signal(),
        dist=signal_model.uniform_shifts(0.0, 0.1),
        n=800,
        sigma=1.0,
        replicates=replicates,
        tau_grid=shift_estimation.TauGrid(-0.2, 0.2, 161),
        seed=seed,
        weight_filter=filters.make_projection_filter(5),
        refine=True,
        workers=workers,
    )

""" Signals, shift distributions and synthetic curve panels.

A panel holds J curves observed on the grid t_i = i/n, each curve being a
translated copy of a symmetric 1-periodic signal plus Gaussian noise:

    Y_ij = f(t_i - theta_j) + sigma * eps_ij

Signals are either stored as cosine coefficients (CosineSignal) or given by a
closed-form function that is checked for symmetry and periodicity
(SampledSignal).
"""

import dataclasses
import logging
import math
import warnings
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import special

from . import constants, utils
from .errors import InvalidArgumentError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, Sequence[float], np.ndarray]

# number of harmonics evaluated per block when summing a long cosine series
_SERIES_BLOCK = 2048


def _readonly(values) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


@dataclasses.dataclass(frozen=True)
class TimeGrid:
    """The equispaced design t_i = i/n, i = 1..n."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InvalidArgumentError(f"n must be a positive integer, got {self.n}")

    @property
    def points(self) -> np.ndarray:
        return np.arange(1, self.n + 1, dtype=float) / self.n

    @property
    def mesh(self) -> float:
        return 1.0 / self.n


@dataclasses.dataclass(frozen=True, eq=False)
class CosineSignal:
    """A symmetric 1-periodic signal f(t) = f_0 + sqrt(2) sum_k f_k cos(2 pi k t).

    Attributes:
        coefficients: f_1, ..., f_K.
        f0: The mean term.
        closed_form: Optional exact evaluator for a series that had to be truncated.
            When present, eval_signal uses it instead of the stored partial sum.
        name: A label used in reports.
    """

    coefficients: np.ndarray
    f0: float = 0.0
    closed_form: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = "cosine"

    def __post_init__(self):
        coefficients = np.atleast_1d(np.asarray(self.coefficients, dtype=float))
        if coefficients.ndim != 1 or not np.all(np.isfinite(coefficients)):
            raise InvalidArgumentError("coefficients must be a finite 1-D sequence")
        if not math.isfinite(self.f0):
            raise InvalidArgumentError("f0 must be finite")
        object.__setattr__(self, "coefficients", _readonly(coefficients))

    @property
    def cutoff(self) -> int:
        return len(self.coefficients)

    @property
    def axis(self) -> float:
        return 0.0


@dataclasses.dataclass(frozen=True, eq=False)
class SampledSignal:
    """A closed-form signal, symmetric about `axis` and 1-periodic.

    Symmetry and periodicity are checked on SYMMETRY_CHECK_POINTS points when the
    signal is built; a violation raises InvalidArgumentError.

    Attributes:
        function: Vectorized real function of t.
        cutoff: Number of harmonics used when the signal enters spectral computations.
        axis: The symmetry axis c, f(c + x) = f(c - x).
        name: A label used in reports.
        coefficients: Optional exact cosine coefficients about the axis (f_1..f_cutoff).
        f0: Mean term matching `coefficients`; ignored when coefficients is None.
    """

    function: Callable[[np.ndarray], np.ndarray]
    cutoff: int
    axis: float = 0.0
    name: str = "sampled"
    coefficients: Optional[np.ndarray] = None
    f0: float = 0.0

    def __post_init__(self):
        if self.cutoff < 1:
            raise InvalidArgumentError(f"cutoff must be >= 1, got {self.cutoff}")
        if self.coefficients is not None:
            object.__setattr__(self, "coefficients", _readonly(self.coefficients))
        _check_symmetric_periodic(self.function, self.axis)


Signal = Union[CosineSignal, SampledSignal]


def _check_symmetric_periodic(function, axis: float):
    checkpoints = np.arange(constants.SYMMETRY_CHECK_POINTS) / constants.SYMMETRY_CHECK_POINTS
    values = np.asarray(function(checkpoints), dtype=float)
    if values.shape != checkpoints.shape or not np.all(np.isfinite(values)):
        raise InvalidArgumentError("signal function must return finite values elementwise")
    scale = max(1.0, float(np.max(np.abs(values))))
    tolerance = constants.SYMMETRY_RELATIVE_TOLERANCE * scale

    periodic_gap = np.max(np.abs(np.asarray(function(checkpoints + 1.0)) - values))
    if periodic_gap > tolerance:
        raise InvalidArgumentError(
            f"signal is not 1-periodic (max deviation {periodic_gap:.3e})"
        )
    mirror_gap = np.max(
        np.abs(np.asarray(function(axis + checkpoints)) - np.asarray(function(axis - checkpoints)))
    )
    if mirror_gap > tolerance:
        raise InvalidArgumentError(
            f"signal is not symmetric about {axis} (max deviation {mirror_gap:.3e})"
        )


@dataclasses.dataclass(frozen=True)
class ShiftDistribution:
    """Law of the random translations.

    Attributes:
        kind: One of uniform, cosine-bump, bimodal-cosine-mixture, point-mass.
        centers: Component centers.
        half_widths: Component half-widths (0 for a point mass).
        weights: Mixture weights, summing to 1.
    """

    kind: str
    centers: Tuple[float, ...]
    half_widths: Tuple[float, ...]
    weights: Tuple[float, ...]

    def __post_init__(self):
        known = (
            constants.UNIFORM,
            constants.COSINE_BUMP,
            constants.BIMODAL,
            constants.POINT_MASS,
        )
        if self.kind not in known:
            raise InvalidArgumentError(f"unknown shift distribution {self.kind!r}")
        if not len(self.centers) == len(self.half_widths) == len(self.weights) >= 1:
            raise InvalidArgumentError("centers, half_widths and weights must align")
        if any(weight <= 0 for weight in self.weights) or not math.isclose(
            sum(self.weights), 1.0, abs_tol=1e-12
        ):
            raise InvalidArgumentError("weights must be positive and sum to 1")
        if self.kind == constants.POINT_MASS:
            if any(width != 0 for width in self.half_widths):
                raise InvalidArgumentError("a point mass has zero half-width")
        elif any(width <= 0 for width in self.half_widths):
            raise InvalidArgumentError("half-widths must be positive")
        if self.kind == constants.BIMODAL and (
            len(self.centers) != 2 or self.centers[0] == self.centers[1]
        ):
            raise InvalidArgumentError("a bimodal mixture needs two distinct centers")
        if self.tau0 >= 0.25:
            warnings.warn(
                f"shift support bound {self.tau0} is not below 1/4; "
                "identifiability then rests on the search grid only",
                RuntimeWarning,
            )

    @property
    def support(self) -> Tuple[float, float]:
        low = min(c - w for c, w in zip(self.centers, self.half_widths))
        high = max(c + w for c, w in zip(self.centers, self.half_widths))
        return low, high

    @property
    def tau0(self) -> float:
        return max(abs(bound) for bound in self.support)

    @property
    def modes(self) -> Tuple[float, ...]:
        if self.kind == constants.UNIFORM:
            return ()
        return tuple(self.centers)


def uniform_shifts(center: float = 0.0, half_width: float = 0.1) -> ShiftDistribution:
    return ShiftDistribution(constants.UNIFORM, (center,), (half_width,), (1.0,))


def cosine_bump_shifts(center: float = 0.0, half_width: float = 0.1) -> ShiftDistribution:
    return ShiftDistribution(constants.COSINE_BUMP, (center,), (half_width,), (1.0,))


def bimodal_shifts(
    centers: Tuple[float, float] = constants.BIMODAL_CENTERS,
    half_width: float = constants.BIMODAL_HALF_WIDTH,
    weights: Tuple[float, float] = (0.5, 0.5),
) -> ShiftDistribution:
    return ShiftDistribution(
        constants.BIMODAL, tuple(centers), (half_width, half_width), tuple(weights)
    )


def point_mass_shifts(value: float) -> ShiftDistribution:
    return ShiftDistribution(constants.POINT_MASS, (value,), (0.0,), (1.0,))


@dataclasses.dataclass(frozen=True, eq=False)
class CurvePanel:
    """J curves of n noisy samples.

    Attributes:
        grid: The sampling design.
        values: Array of shape (J, n).
        sigma: Noise standard deviation (0 for noise-free data).
        shifts: The true translations theta_j, when the panel is synthetic.
        axis: Symmetry axis of the generating signal; the location estimated for
            curve j is axis + theta_j.
        curve_ids: Labels of the curves, in row order.
    """

    grid: TimeGrid
    values: np.ndarray
    sigma: float = 0.0
    shifts: Optional[np.ndarray] = None
    axis: float = 0.0
    curve_ids: Tuple[str, ...] = ()

    def __post_init__(self):
        values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if values.ndim != 2 or values.shape[0] < 1:
            raise InvalidArgumentError("a panel needs at least one curve")
        if values.shape[1] != self.grid.n:
            raise InvalidArgumentError(
                f"panel has {values.shape[1]} columns but the grid has n={self.grid.n}"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidArgumentError("panel values must be finite")
        if self.sigma < 0:
            raise InvalidArgumentError("sigma must be >= 0")
        object.__setattr__(self, "values", _readonly(values))
        if self.shifts is not None:
            shifts = _readonly(self.shifts)
            if shifts.shape != (values.shape[0],):
                raise InvalidArgumentError("one shift per curve is required")
            object.__setattr__(self, "shifts", shifts)
        if not self.curve_ids:
            object.__setattr__(
                self,
                "curve_ids",
                tuple(
                    f"{constants.CURVE_COLUMN_PREFIX}{j + 1}"
                    for j in range(values.shape[0])
                ),
            )
        elif len(self.curve_ids) != values.shape[0]:
            raise InvalidArgumentError("one curve id per curve is required")

    @property
    def n_curves(self) -> int:
        return self.values.shape[0]

    @property
    def target_locations(self) -> Optional[np.ndarray]:
        if self.shifts is None:
            return None
        return self.axis + self.shifts


@dataclasses.dataclass(frozen=True)
class SignalClassDiagnostics:
    """Quantities entering the signal class assumptions and the Fisher information."""

    f1_squared: float
    second_deriv_norm_sq: float
    sum_k2_abs_fk: float
    deriv_norm_sq: float


def eval_signal(signal: Signal, t: ArrayLike):
    """Evaluates a signal at t (scalar or array).

    Returns:
        A float for scalar t, otherwise an array shaped like t.
    """
    t_array = np.asarray(t, dtype=float)
    if isinstance(signal, SampledSignal):
        values = np.asarray(signal.function(t_array), dtype=float)
    elif signal.closed_form is not None:
        values = np.asarray(signal.closed_form(t_array), dtype=float)
    else:
        values = _cosine_series(signal.coefficients, signal.f0, t_array)
    if values.ndim == 0:
        return float(values)
    return values


def _cosine_series(coefficients: np.ndarray, f0: float, t: np.ndarray) -> np.ndarray:
    flat = t.reshape(-1)
    total = np.zeros_like(flat)
    for start in range(0, len(coefficients), _SERIES_BLOCK):
        block = coefficients[start : start + _SERIES_BLOCK]
        frequencies = constants.TWO_PI * np.arange(start + 1, start + 1 + len(block))
        total += np.cos(np.outer(flat, frequencies)) @ block
    return (f0 + constants.SQRT2 * total).reshape(t.shape)


def half_sine_signal() -> CosineSignal:
    """The centered periodic half-sine arch |sin(pi t)| - 2/pi.

    Coefficients f_k = -(2 sqrt(2)/pi) / (4k^2 - 1) are kept while |f_k| >= 1e-12.
    """
    scale = 2.0 * constants.SQRT2 / math.pi
    cutoff = int(math.floor(math.sqrt((scale / constants.HALF_SINE_TRUNCATION + 1.0) / 4.0)))
    k = np.arange(1, cutoff + 1, dtype=float)
    coefficients = -scale / (4.0 * k * k - 1.0)

    def closed_form(t):
        return np.abs(np.sin(math.pi * t)) - 2.0 / math.pi

    return CosineSignal(coefficients, 0.0, closed_form, constants.HALF_SINE)


def single_harmonic_signal(f1: float = 1.0) -> CosineSignal:
    return CosineSignal(np.array([f1]), name=constants.SINGLE_HARMONIC)


def laser_signal(
    amplitude: float = constants.LASER_ACCEPTANCE_AMPLITUDE,
    frequency: float = constants.LASER_FREQUENCY,
    center: float = 0.0,
) -> SampledSignal:
    """Laser vibrometry type signal a * cos(b * cos(pi (x - c))).

    Its cosine coefficients about c follow from the Jacobi-Anger expansion:
    f_0 = a J_0(b) and f_m = sqrt(2) a (-1)^m J_{2m}(b).
    """
    orders = np.arange(1, int(frequency) + 64)
    bessel = special.jv(2 * orders, frequency)
    significant = np.nonzero(np.abs(bessel) >= constants.HALF_SINE_TRUNCATION)[0]
    cutoff = int(orders[significant[-1]]) if len(significant) else 1
    coefficients = (
        constants.SQRT2 * amplitude * np.where(orders % 2 == 0, 1.0, -1.0) * bessel
    )[:cutoff]

    def function(x):
        return amplitude * np.cos(frequency * np.cos(math.pi * (x - center)))

    return SampledSignal(
        function=function,
        cutoff=cutoff,
        axis=center,
        name=constants.LASER,
        coefficients=coefficients,
        f0=float(amplitude * special.jv(0, frequency)),
    )


def sampled_to_cosine(signal: Signal) -> CosineSignal:
    """Returns the cosine representation of a signal about its symmetry axis."""
    if isinstance(signal, CosineSignal):
        return signal
    if signal.coefficients is not None:
        return CosineSignal(signal.coefficients, signal.f0, name=signal.name)

    count = max(constants.QUADRATURE_POINTS, 4 * signal.cutoff)
    x = np.arange(count) / count
    spectrum = np.fft.rfft(np.asarray(signal.function(signal.axis + x), dtype=float))
    coefficients = constants.SQRT2 * spectrum.real[1 : signal.cutoff + 1] / count
    return CosineSignal(coefficients, float(spectrum.real[0] / count), name=signal.name)


def signal_coefficients(signal: Signal, K: int) -> np.ndarray:
    """Returns the exact cosine coefficients f_1..f_K about the signal axis (zero padded)."""
    coefficients = sampled_to_cosine(signal).coefficients
    out = np.zeros(K)
    used = min(K, len(coefficients))
    out[:used] = coefficients[:used]
    return out


def sample_shifts(dist: ShiftDistribution, J: int, seed: int) -> np.ndarray:
    """Draws J i.i.d. translations, deterministically given the seed.

    Component choice and position use two uniforms per draw from a single
    stream, so draw j does not depend on how many draws follow it.
    """
    if J < 1:
        raise InvalidArgumentError(f"J must be >= 1, got {J}")
    if dist.kind == constants.POINT_MASS:
        return np.full(J, float(dist.centers[0]))

    uniforms = utils.rng_for(seed, constants.SHIFT_STREAM).random((J, 2))
    cumulative = np.cumsum(dist.weights)
    component = np.minimum(
        np.searchsorted(cumulative, uniforms[:, 0], side="right"), len(cumulative) - 1
    )
    centers = np.asarray(dist.centers)[component]
    half_widths = np.asarray(dist.half_widths)[component]

    if dist.kind == constants.UNIFORM:
        offsets = (2.0 * uniforms[:, 1] - 1.0) * half_widths
    else:
        offsets = _invert_bump_cdf(uniforms[:, 1], half_widths)
    low, high = dist.support
    return np.clip(centers + offsets, low, high)


def _bump_cdf(offset, half_width):
    u = np.clip(offset, -half_width, half_width)
    return (u + half_width) / (2.0 * half_width) + np.sin(math.pi * u / half_width) / (
        2.0 * math.pi
    )


def _invert_bump_cdf(targets: np.ndarray, half_widths: np.ndarray) -> np.ndarray:
    # bisection; the cdf is strictly increasing on [-w, w]
    low, high = -half_widths.copy(), half_widths.copy()
    for _ in range(64):
        middle = 0.5 * (low + high)
        below = _bump_cdf(middle, half_widths) < targets
        low = np.where(below, middle, low)
        high = np.where(below, high, middle)
    return 0.5 * (low + high)


def shift_pdf(dist: ShiftDistribution, x: ArrayLike) -> np.ndarray:
    """Closed-form density of a continuous shift distribution."""
    if dist.kind == constants.POINT_MASS:
        raise InvalidArgumentError("a point mass has no density")
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x)
    for center, half_width, weight in zip(dist.centers, dist.half_widths, dist.weights):
        offset = x - center
        inside = np.abs(offset) <= half_width
        if dist.kind == constants.UNIFORM:
            component = np.where(inside, 1.0 / (2.0 * half_width), 0.0)
        else:
            component = np.where(
                inside,
                np.cos(math.pi * offset / (2.0 * half_width)) ** 2 / half_width,
                0.0,
            )
        total = total + weight * component
    return total


def shift_cdf(dist: ShiftDistribution, x: ArrayLike) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x)
    for center, half_width, weight in zip(dist.centers, dist.half_widths, dist.weights):
        if dist.kind == constants.POINT_MASS:
            component = (x >= center).astype(float)
        elif dist.kind == constants.UNIFORM:
            component = np.clip((x - center + half_width) / (2.0 * half_width), 0.0, 1.0)
        else:
            component = _bump_cdf(x - center, half_width)
        total = total + weight * component
    return total


def generate_panel(
    signal: Union[Signal, Sequence[Signal]],
    dist: ShiftDistribution,
    sigma: float,
    n: int,
    J: int,
    seed: int,
    workers: int = 1,
) -> CurvePanel:
    """Simulates Y_ij = f(t_i - theta_j) + sigma * eps_ij.

    Args:
        signal: A common signal, or one signal per curve.
        dist: Law of the translations.
        sigma: Noise standard deviation, >= 0.
        n: Samples per curve, >= 4.
        J: Number of curves, >= 1.
        seed: Master seed. Curve j draws its noise from the stream (seed, j), so the
            panel does not depend on the number of workers.
        workers: Threads used to generate curves.

    Returns:
        A CurvePanel recording the true shifts.
    """
    return panel_from_shifts(signal, sample_shifts(dist, J, seed), sigma, n, seed, workers)


def panel_from_shifts(
    signal: Union[Signal, Sequence[Signal]],
    shifts: Sequence[float],
    sigma: float,
    n: int,
    seed: int,
    workers: int = 1,
) -> CurvePanel:
    """Simulates one curve per given shift; the noise streams match generate_panel."""
    if n < constants.MIN_SAMPLES:
        raise InvalidArgumentError(f"n must be >= {constants.MIN_SAMPLES}, got {n}")
    if sigma < 0:
        raise InvalidArgumentError(f"sigma must be >= 0, got {sigma}")
    shifts = np.asarray(shifts, dtype=float).reshape(-1)
    J = len(shifts)
    if J < 1:
        raise InvalidArgumentError("at least one shift is required")
    signals = [signal] * J if isinstance(signal, (CosineSignal, SampledSignal)) else list(signal)
    if len(signals) != J:
        raise InvalidArgumentError(f"expected {J} signals, got {len(signals)}")
    axes = {curve_signal.axis for curve_signal in signals}
    if len(axes) != 1:
        raise InvalidArgumentError("per-curve signals must share one symmetry axis")

    grid = TimeGrid(n)
    points = grid.points

    def curve(j: int) -> np.ndarray:
        row = eval_signal(signals[j], points - shifts[j])
        if sigma > 0:
            noise = utils.rng_for(seed, constants.NOISE_STREAM, j).standard_normal(n)
            row = row + sigma * noise
        return row

    rows = utils.parallel_map(curve, range(J), workers)
    logger.debug("generated panel n=%d J=%d sigma=%g", n, J, sigma)
    return CurvePanel(grid, np.vstack(rows), sigma, shifts, axes.pop())


def signal_class_diagnostics(signal: Signal) -> SignalClassDiagnostics:
    coefficients = sampled_to_cosine(signal).coefficients
    k = np.arange(1, len(coefficients) + 1, dtype=float)
    squared = coefficients ** 2
    return SignalClassDiagnostics(
        f1_squared=float(squared[0]) if len(squared) else 0.0,
        second_deriv_norm_sq=float(np.sum((constants.TWO_PI * k) ** 4 * squared)),
        sum_k2_abs_fk=float(np.sum(k ** 2 * np.abs(coefficients))),
        deriv_norm_sq=float(np.sum((constants.TWO_PI * k) ** 2 * squared)),
    )


def fisher_information(signal: Signal, n: int, sigma: float = 1.0) -> float:
    """n ||f'||^2 / sigma^2, the first-order optimal inverse variance."""
    if sigma <= 0:
        raise InvalidArgumentError("sigma must be > 0")
    return n * signal_class_diagnostics(signal).deriv_norm_sq / sigma ** 2


def parse_shift_distribution(text: str) -> ShiftDistribution:
    """Parses uniform:<c>:<w>, bump:<c>:<w>, bimodal[:<c1>:<c2>:<w>] or point:<v>."""
    kind, *fields = text.strip().split(":")
    try:
        numbers = [float(field) for field in fields]
    except ValueError:
        raise InvalidArgumentError(f"non-numeric parameter in distribution {text!r}") from None
    builders = {
        "uniform": (uniform_shifts, (2,)),
        "bump": (cosine_bump_shifts, (2,)),
        "bimodal": (
            lambda *args: bimodal_shifts((args[0], args[1]), args[2]) if args else bimodal_shifts(),
            (0, 3),
        ),
        "point": (point_mass_shifts, (1,)),
    }
    if kind not in builders:
        raise InvalidArgumentError(
            f"unknown distribution {kind!r}; expected one of {sorted(builders)}"
        )
    builder, arities = builders[kind]
    if len(numbers) not in arities:
        raise InvalidArgumentError(f"wrong number of parameters in distribution {text!r}")
    return builder(*numbers)

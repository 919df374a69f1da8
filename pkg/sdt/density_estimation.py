""" Recovery of the shift law from estimated shifts.

Provides the plug-in empirical measure, the kernel density estimator

    phi_hat(x) = 1/(J h) sum_j K((x - theta_j) / h),

and bandwidth selection, either from the convergence rates or by least-squares
cross-validation.
"""

import dataclasses
import logging
import math
import warnings
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate, signal

from . import constants, utils
from .errors import DegenerateInputError, InvalidArgumentError

logger = logging.getLogger(__name__)

THEORETICAL = "theoretical"
LSCV = "lscv"
FIXED = "fixed"
RATE = "rate"


@dataclasses.dataclass(frozen=True, eq=False)
class Kernel:
    """A smoothing kernel checked numerically when built.

    Attributes:
        id: gaussian, epanechnikov or a custom label.
        function: Vectorized evaluation rule u -> K(u).
        support: Half-width of the support, math.inf for unbounded kernels.
        order: Declared order l; moments 1..l-1 must vanish.
        self_convolution: Optional closed form of (K * K)(u), used by LSCV.
    """

    id: str
    function: Callable[[np.ndarray], np.ndarray]
    support: float
    order: int = 2
    self_convolution: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if self.order < 2:
            raise InvalidArgumentError("kernel order must be >= 2")
        if not self.support > 0:
            raise InvalidArgumentError("kernel support must be > 0")
        half_width = (
            self.support if math.isfinite(self.support) else constants.GAUSSIAN_CHECK_HALF_WIDTH
        )
        nodes = np.linspace(-half_width, half_width, constants.KERNEL_CHECK_NODES)
        values = np.asarray(self.function(nodes), dtype=float)
        mass = integrate.trapezoid(values, nodes)
        if abs(mass - 1.0) > constants.KERNEL_CHECK_TOLERANCE:
            raise InvalidArgumentError(f"kernel {self.id!r} integrates to {mass}, not 1")
        for power in range(1, self.order):
            moment = integrate.trapezoid(nodes ** power * values, nodes)
            if abs(moment) > constants.KERNEL_CHECK_TOLERANCE:
                raise InvalidArgumentError(
                    f"kernel {self.id!r} has moment {power} = {moment}, "
                    f"inconsistent with order {self.order}"
                )

    @property
    def nonnegative(self) -> bool:
        return self.id in (constants.GAUSSIAN, constants.EPANECHNIKOV)


@dataclasses.dataclass(frozen=True, eq=False)
class DensityEstimate:
    """phi_hat evaluated on x_grid with bandwidth h from J points."""

    x_grid: np.ndarray
    values: np.ndarray
    h: float
    kernel_id: str
    J: int

    def integral(self) -> float:
        return float(integrate.trapezoid(self.values, self.x_grid))


def _gaussian(u):
    return np.exp(-0.5 * np.square(u)) / math.sqrt(constants.TWO_PI)


def _gaussian_self_convolution(u):
    return np.exp(-0.25 * np.square(u)) / math.sqrt(2.0 * constants.TWO_PI)


def _epanechnikov(u):
    u = np.asarray(u, dtype=float)
    return np.where(np.abs(u) <= 1.0, 0.75 * (1.0 - u * u), 0.0)


def _epanechnikov_self_convolution(u):
    a = np.abs(np.asarray(u, dtype=float))
    return np.where(a <= 2.0, 3.0 / 160.0 * (2.0 - a) ** 3 * (a * a + 6.0 * a + 4.0), 0.0)


GAUSSIAN_KERNEL = Kernel(
    constants.GAUSSIAN, _gaussian, math.inf, 2, _gaussian_self_convolution
)
EPANECHNIKOV_KERNEL = Kernel(
    constants.EPANECHNIKOV, _epanechnikov, 1.0, 2, _epanechnikov_self_convolution
)
KERNELS = {kernel.id: kernel for kernel in (GAUSSIAN_KERNEL, EPANECHNIKOV_KERNEL)}


def get_kernel(kernel_id: str) -> Kernel:
    try:
        return KERNELS[kernel_id]
    except KeyError:
        raise InvalidArgumentError(
            f"unknown kernel {kernel_id!r}; expected one of {sorted(KERNELS)}"
        ) from None


def kernel_eval(kernel: Kernel, u):
    values = np.asarray(kernel.function(np.asarray(u, dtype=float)), dtype=float)
    return float(values) if values.ndim == 0 else values


def _check_points(points: Sequence[float]) -> np.ndarray:
    array = np.asarray(points, dtype=float).reshape(-1)
    if array.size == 0:
        raise InvalidArgumentError("at least one point is required")
    if not np.all(np.isfinite(array)):
        raise InvalidArgumentError("points must be finite")
    return array


def default_x_grid(points: np.ndarray, h: float) -> np.ndarray:
    padding = constants.DENSITY_GRID_PADDING * h
    return np.linspace(
        points.min() - padding, points.max() + padding, constants.DENSITY_GRID_POINTS
    )


def kde(
    points: Sequence[float],
    kernel: Kernel,
    h: float,
    x_grid: Optional[Sequence[float]] = None,
) -> DensityEstimate:
    """Kernel density estimate at every grid point.

    Args:
        points: The J estimated shifts.
        kernel: Smoothing kernel.
        h: Bandwidth, > 0.
        x_grid: Evaluation points; defaults to 201 points spanning the data +- 3h.
    """
    points = _check_points(points)
    if not h > 0:
        raise InvalidArgumentError(f"bandwidth must be > 0, got {h}")
    grid = default_x_grid(points, h) if x_grid is None else np.asarray(x_grid, dtype=float)
    # summed in fixed point order
    values = kernel.function(np.subtract.outer(grid, points) / h).sum(axis=1)
    return DensityEstimate(grid, values / (len(points) * h), float(h), kernel.id, len(points))


def bandwidth_theoretical(n: int, J: int, beta: float) -> float:
    """Rate-optimal bandwidth for n samples per curve and J curves.

    n^(-1/(2 beta + 1)) while J <= (n / log n)^((2 beta + 1)/(beta + 2)),
    (log n / n)^(1/(beta + 2)) beyond.
    """
    if beta <= 1:
        raise InvalidArgumentError(f"beta must be > 1, got {beta}")
    if n < 2 or J < 1:
        raise InvalidArgumentError("n must be >= 2 and J >= 1")
    threshold = (n / math.log(n)) ** ((2.0 * beta + 1.0) / (beta + 2.0))
    if J <= threshold:
        return n ** (-1.0 / (2.0 * beta + 1.0))
    return (math.log(n) / n) ** (1.0 / (beta + 2.0))


def bandwidth_rate(J: int, beta: float, scale: float) -> float:
    """scale * J^(-1/(2 beta + 1)), the classical rate for J direct observations."""
    if J < 1 or not scale > 0 or not beta > 0:
        raise InvalidArgumentError("J >= 1, scale > 0 and beta > 0 are required")
    return scale * J ** (-1.0 / (2.0 * beta + 1.0))


def _integral_of_square(points: np.ndarray, kernel: Kernel, h: float) -> float:
    J = len(points)
    differences = np.subtract.outer(points, points) / h
    if kernel.self_convolution is not None:
        return float(kernel.self_convolution(differences).sum() / (J * J * h))
    reach = (
        kernel.support if math.isfinite(kernel.support) else constants.GAUSSIAN_CHECK_HALF_WIDTH
    )
    padding = max(constants.LSCV_QUADRATURE_PADDING, reach) * h
    grid = np.linspace(
        points.min() - padding, points.max() + padding, constants.LSCV_QUADRATURE_POINTS
    )
    values = kde(points, kernel, h, grid).values
    return float(integrate.trapezoid(values ** 2, grid))


def lscv_score(points: Sequence[float], kernel: Kernel, h: float) -> float:
    """int phi_hat_h^2 - (2/J) sum_j phi_hat_{h,-j}(theta_j)."""
    points = _check_points(points)
    J = len(points)
    if J < 2:
        raise InvalidArgumentError("cross-validation needs at least two points")
    pair_values = kernel.function(np.subtract.outer(points, points) / h)
    off_diagonal = pair_values.sum(axis=1) - np.diag(pair_values)
    leave_one_out = off_diagonal / ((J - 1) * h)
    return _integral_of_square(points, kernel, h) - 2.0 * float(np.mean(leave_one_out))


def bandwidth_lscv(points: Sequence[float], kernel: Kernel, h_grid: Sequence[float]) -> float:
    """The bandwidth of h_grid minimizing the LSCV score, ties going to the smaller h."""
    points = _check_points(points)
    grid = np.sort(np.asarray(h_grid, dtype=float).reshape(-1))
    if grid.size == 0 or np.any(grid <= 0):
        raise InvalidArgumentError("h_grid must hold positive bandwidths")
    distinct = np.unique(points)
    if len(distinct) == 1:
        raise DegenerateInputError("all points are identical; LSCV is unbounded below")
    if len(distinct) < 3:
        raise InvalidArgumentError("cross-validation needs at least 3 distinct points")
    if grid.size == 1:
        warnings.warn("h_grid has a single value; returning it", RuntimeWarning)
        return float(grid[0])
    scores = np.array([lscv_score(points, kernel, h) for h in grid])
    best = int(np.argmin(scores))
    logger.debug("lscv selected h=%g (score %g)", grid[best], scores[best])
    return float(grid[best])


@dataclasses.dataclass(frozen=True)
class BandwidthPolicy:
    """How to choose h.

    kind is theoretical (beta), lscv (h_min, h_max, count; geometric grid),
    fixed (h) or rate (beta, scale).
    """

    kind: str
    beta: float = 2.0
    h_min: float = 0.005
    h_max: float = 0.2
    count: int = 30
    h: float = 0.0
    scale: float = 1.0

    def describe(self) -> str:
        if self.kind == THEORETICAL:
            return f"{THEORETICAL}:{self.beta:g}"
        if self.kind == LSCV:
            return f"{LSCV}:{self.h_min:g}:{self.h_max:g}:{self.count}"
        if self.kind == FIXED:
            return f"{FIXED}:{self.h:g}"
        return f"{RATE}:{self.beta:g}:{self.scale:g}"


def parse_bandwidth_policy(text: str) -> BandwidthPolicy:
    """Parses theoretical:<beta>, lscv:<h_min>:<h_max>:<count>, fixed:<h> or rate:<beta>:<scale>."""
    kind, *fields = text.strip().split(":")
    expected = {THEORETICAL: 1, LSCV: 3, FIXED: 1, RATE: 2}
    if kind not in expected:
        raise InvalidArgumentError(
            f"unknown bandwidth policy {kind!r}; expected one of {sorted(expected)}"
        )
    if len(fields) != expected[kind]:
        raise InvalidArgumentError(
            f"bandwidth policy {kind!r} takes {expected[kind]} parameter(s), got {len(fields)}"
        )
    try:
        numbers = [float(field) for field in fields]
    except ValueError:
        raise InvalidArgumentError(f"non-numeric bandwidth parameter in {text!r}") from None

    if kind == THEORETICAL:
        if numbers[0] <= 1:
            raise InvalidArgumentError("theoretical bandwidth needs beta > 1")
        return BandwidthPolicy(kind, beta=numbers[0])
    if kind == LSCV:
        h_min, h_max, count = numbers
        if not 0 < h_min <= h_max or count < 1 or int(count) != count:
            raise InvalidArgumentError("lscv needs 0 < h_min <= h_max and an integer count >= 1")
        return BandwidthPolicy(kind, h_min=h_min, h_max=h_max, count=int(count))
    if kind == FIXED:
        if numbers[0] <= 0:
            raise InvalidArgumentError("fixed bandwidth must be > 0")
        return BandwidthPolicy(kind, h=numbers[0])
    if numbers[0] <= 0 or numbers[1] <= 0:
        raise InvalidArgumentError("rate bandwidth needs beta > 0 and scale > 0")
    return BandwidthPolicy(kind, beta=numbers[0], scale=numbers[1])


def select_bandwidth(
    policy: BandwidthPolicy,
    points: Sequence[float],
    kernel: Kernel,
    n: Optional[int] = None,
) -> float:
    """Applies a bandwidth policy to J points coming from curves of n samples."""
    points = _check_points(points)
    if policy.kind == THEORETICAL:
        if n is None:
            raise InvalidArgumentError("the theoretical bandwidth needs the curve length n")
        return bandwidth_theoretical(n, len(points), policy.beta)
    if policy.kind == LSCV:
        grid = utils.geometric_grid(policy.h_min, policy.h_max, policy.count)
        return bandwidth_lscv(points, kernel, grid)
    if policy.kind == FIXED:
        return policy.h
    return bandwidth_rate(len(points), policy.beta, policy.scale)


def empirical_measure_apply(points: Sequence[float], g: Callable[[np.ndarray], np.ndarray]) -> float:
    """(1/J) sum_j g(theta_j), the plug-in empirical measure applied to g."""
    points = _check_points(points)
    values = np.broadcast_to(np.asarray(g(points), dtype=float), points.shape)
    return float(np.mean(values))


def find_modes(
    estimate: DensityEstimate,
    relative_threshold: float = constants.MODE_RELATIVE_THRESHOLD,
    prominence: float = constants.MODE_PROMINENCE,
) -> np.ndarray:
    """Grid locations of the modes of an estimate.

    A mode is a strict local maximum above relative_threshold * max whose
    prominence is at least prominence * max, so ripples of a small bandwidth
    inside one bump do not count.
    """
    values = estimate.values
    peak = values.max(initial=0.0)
    if peak <= 0:
        return np.empty(0)
    indices, _ = signal.find_peaks(values, prominence=prominence * peak)
    strict = (values[indices] > values[indices - 1]) & (values[indices] > values[indices + 1])
    indices = indices[strict & (values[indices] > relative_threshold * peak)]
    return estimate.x_grid[indices]


def count_modes(
    estimate: DensityEstimate,
    relative_threshold: float = constants.MODE_RELATIVE_THRESHOLD,
    prominence: float = constants.MODE_PROMINENCE,
) -> int:
    return len(find_modes(estimate, relative_threshold, prominence))

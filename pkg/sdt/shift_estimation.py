""" Shift estimation by maximizing the weighted Fourier contrast.

The adaptive pipeline for one curve is

    center -> empirical_spectrum -> criterion_profile -> hull_path -> select_shift

For every pinsker filter length K the contrast is maximized over a fixed grid of
candidate shifts, giving M(K) and its argmax tau_hat(K). The upper concave hull
of K -> M(K) gives the penalty thresholds alpha_p at which the penalized
length choice jumps, and the estimate is the grid point collecting the largest
total slope drop over the hull vertices that voted for it.
"""

import dataclasses
import logging
import math
import warnings
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from . import constants, filters, signal_model, spectral, utils
from .errors import InvalidArgumentError, SdtError
from .filters import Filter

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class TauGrid:
    """Regular grid of candidate shifts tau_min = tau_1 < ... < tau_m = tau_max."""

    tau_min: float
    tau_max: float
    m_points: int = constants.DEFAULT_M_POINTS

    def __post_init__(self):
        if self.m_points < constants.MIN_GRID_POINTS:
            raise InvalidArgumentError(
                f"the shift grid needs at least {constants.MIN_GRID_POINTS} points"
            )
        if not self.tau_max > self.tau_min:
            raise InvalidArgumentError("tau_max must exceed tau_min")
        diameter = self.tau_max - self.tau_min
        if diameter > constants.MAX_GRID_DIAMETER + 1e-12:
            raise InvalidArgumentError(
                f"shift grid diameter {diameter} exceeds half a period"
            )
        if math.isclose(diameter, constants.MAX_GRID_DIAMETER, abs_tol=1e-12):
            warnings.warn(
                "shift grid diameter equals half a period; the contrast may be "
                "maximal at both ends",
                RuntimeWarning,
            )

    @property
    def points(self) -> np.ndarray:
        # written so that a grid symmetric about 0 has exactly negated points
        i = np.arange(self.m_points, dtype=float)
        last = self.m_points - 1
        return (self.tau_min * (last - i) + self.tau_max * i) / last

    @property
    def mesh(self) -> float:
        return (self.tau_max - self.tau_min) / (self.m_points - 1)


def default_K_grid(n: int) -> Tuple[int, ...]:
    return tuple(range(1, min(spectral.nyquist_bound(n), constants.DEFAULT_K_CAP) + 1))


@dataclasses.dataclass(frozen=True)
class EstimationConfig:
    """Settings of the adaptive pipeline.

    Attributes:
        tau_grid: Candidate shifts.
        K_grid: Pinsker lengths to scan; empty means default_K_grid(n).
        beta: Pinsker exponent.
        refine: Replace the grid estimate by the vertex of the parabola through
            the contrast at the estimate and its two neighbours.
        alpha0_cap: None discards the first, infinite jump. A factor c > 1 treats
            alpha_0 as c * alpha_1 so that the first vertex can collect mass.
        spectrum_method: "fft" or "direct".
    """

    tau_grid: TauGrid
    K_grid: Tuple[int, ...] = ()
    beta: float = constants.DEFAULT_BETA
    refine: bool = False
    alpha0_cap: Optional[float] = None
    spectrum_method: str = spectral.FFT

    def __post_init__(self):
        if self.beta <= 0:
            raise InvalidArgumentError("beta must be > 0")
        if self.alpha0_cap is not None and self.alpha0_cap <= 1:
            raise InvalidArgumentError("alpha0_cap must be > 1")

    def K_grid_for(self, n: int) -> Tuple[int, ...]:
        return tuple(self.K_grid) if self.K_grid else default_K_grid(n)


@dataclasses.dataclass(frozen=True, eq=False)
class CriterionProfile:
    """Per-length maxima of the contrast over the shift grid.

    Attributes:
        K_grid: Filter lengths, strictly increasing.
        M: M(K), the maximal contrast.
        tau_index: Grid index of tau_hat(K), the first maximizer.
        tau_grid: The shift grid.
        values: Contrast table of shape (len(K_grid), m_points).
        beta: Pinsker exponent used.
    """

    K_grid: np.ndarray
    M: np.ndarray
    tau_index: np.ndarray
    tau_grid: TauGrid
    values: np.ndarray
    beta: float

    @property
    def tau_hat(self) -> np.ndarray:
        return self.tau_grid.points[self.tau_index]


@dataclasses.dataclass(frozen=True, eq=False)
class HullPath:
    """Vertices K_p of the upper concave hull of K -> M(K) and the slopes alpha_p.

    positions[p] indexes the profile arrays; alphas has one entry fewer than
    positions.
    """

    positions: np.ndarray
    K_p: np.ndarray
    alphas: np.ndarray
    termination: str


@dataclasses.dataclass(frozen=True, eq=False)
class ShiftEstimate:
    """Result for one curve.

    Attributes:
        tau_star: The selected grid point.
        selected_K: Length of the voting hull vertex reported by the slope heuristic.
        M_max: M(selected_K).
        degenerate: True when the contrast does not depend on K (e.g. zero data).
        refined: Parabola refined estimate, within one mesh of tau_star.
        profile: Criterion profile, when the adaptive pipeline ran.
        hull: Hull path, when the adaptive pipeline ran.
        error: Failure message; the numeric fields are then NaN.
    """

    tau_star: float
    selected_K: int = 0
    M_max: float = 0.0
    degenerate: bool = False
    refined: Optional[float] = None
    profile: Optional[CriterionProfile] = None
    hull: Optional[HullPath] = None
    error: Optional[str] = None

    @property
    def theta_hat(self) -> float:
        return self.refined if self.refined is not None else self.tau_star

    @classmethod
    def failed(cls, message: str) -> "ShiftEstimate":
        return cls(tau_star=math.nan, M_max=math.nan, degenerate=True, error=message)


def criterion_profile(
    spectrum: spectral.EmpiricalSpectrum,
    tau_grid: TauGrid,
    K_grid: Sequence[int],
    beta: float = constants.DEFAULT_BETA,
) -> CriterionProfile:
    """Scans the pinsker filters of every length in K_grid over the shift grid.

    Ties in the argmax go to the smallest grid index.
    """
    K_array = np.asarray(K_grid, dtype=int)
    if K_array.size == 0:
        raise InvalidArgumentError("K_grid must not be empty")
    if np.any(np.diff(K_array) <= 0) or K_array[0] < 1:
        raise InvalidArgumentError("K_grid must be strictly increasing positive integers")
    if K_array[-1] > spectrum.K_max:
        raise InvalidArgumentError(
            f"largest filter length {K_array[-1]} exceeds the spectrum cutoff {spectrum.K_max}"
        )
    width = int(K_array[-1])
    weights = filters.pinsker_weight_matrix(K_array, beta, width)
    values = spectral.criterion_table(spectrum, weights, tau_grid.points)
    tau_index = np.argmax(values, axis=1)
    M = values[np.arange(len(K_array)), tau_index]
    return CriterionProfile(K_array, M, tau_index, tau_grid, values, beta)


def hull_path(profile: CriterionProfile) -> HullPath:
    """Walks the upper concave hull of K -> M(K) from the smallest K.

    From vertex K_p the next vertex maximizes (M(K) - M(K_p)) / (K - K_p) over
    K > K_p, ties going to the larger K. The walk stops at the last K or when the
    best slope is not positive.
    """
    K = profile.K_grid.astype(float)
    M = profile.M
    positions = [0]
    alphas: List[float] = []
    termination = constants.REACHED_K_MAX
    current = 0
    while current < len(K) - 1:
        slopes = (M[current + 1 :] - M[current]) / (K[current + 1 :] - K[current])
        best = slopes.max()
        if best <= 0:
            termination = constants.NONPOSITIVE_SLOPE
            break
        current = current + 1 + int(np.nonzero(slopes == best)[0][-1])
        positions.append(current)
        alphas.append(float(best))
    positions_array = np.asarray(positions, dtype=int)
    return HullPath(
        positions_array, profile.K_grid[positions_array], np.asarray(alphas), termination
    )


def khat_of_alpha(hull: HullPath, alpha: float) -> int:
    """The length minimizing -M(K) + alpha K.

    K_hat(alpha) = K_p for alpha in (alpha_p, alpha_{p-1}] with alpha_0 = +inf; at
    alpha = alpha_p the larger length K_{p+1} wins.
    """
    if not alpha > 0:
        raise InvalidArgumentError(f"the penalty alpha must be > 0, got {alpha}")
    if len(hull.K_p) == 0:
        raise InvalidArgumentError("empty hull path")
    count = int(np.count_nonzero(hull.alphas >= alpha))
    return int(hull.K_p[count])


def select_shift(
    profile: CriterionProfile,
    hull: HullPath,
    alpha0_cap: Optional[float] = None,
    slope_factor: float = constants.SLOPE_HEURISTIC_FACTOR,
) -> ShiftEstimate:
    """Picks the grid point collecting the largest cumulated slope drop.

    Vertex p >= 2 adds alpha_{p-1} - alpha_p to the mass of tau_hat(K_p); the last
    vertex has no alpha_p and adds nothing. Ties go to the smallest grid index.
    Without any finite jump, the last hull vertex decides.

    The reported K is K_hat(slope_factor * alpha_last) restricted to the vertices
    voting for tau_star: the largest voter whose entering slope alpha_{p-1} is at
    least that penalty. The final hull slope is the noise level of the criterion.
    With fewer than two slopes, the voter carrying the largest jump is reported.
    """
    if len(hull.positions) == 0:
        raise InvalidArgumentError("empty hull path")
    masses = np.zeros(profile.tau_grid.m_points)
    decisive = np.zeros(len(hull.positions))
    alphas = hull.alphas
    for p in range(1, len(alphas)):
        decisive[p] = alphas[p - 1] - alphas[p]
    if alpha0_cap is not None and len(alphas) >= 1:
        decisive[0] = (alpha0_cap - 1.0) * alphas[0]
    for p, position in enumerate(hull.positions):
        masses[profile.tau_index[position]] += decisive[p]

    degenerate = bool(np.ptp(profile.M) == 0)
    if masses.max() > 0:
        winner = utils.first_argmax(masses)
        voters = [
            p
            for p, position in enumerate(hull.positions)
            if profile.tau_index[position] == winner
        ]
        chosen = _reported_vertex(voters, decisive, alphas, slope_factor)
    else:
        chosen = len(hull.positions) - 1
        winner = int(profile.tau_index[hull.positions[chosen]])
    if degenerate:
        logger.debug("contrast is constant in K; returning tau_hat(K_1)")
    position = hull.positions[chosen]
    return ShiftEstimate(
        tau_star=float(profile.tau_grid.points[winner]),
        selected_K=int(profile.K_grid[position]),
        M_max=float(profile.M[position]),
        degenerate=degenerate,
        profile=profile,
        hull=hull,
    )


def _reported_vertex(
    voters: List[int], decisive: np.ndarray, alphas: np.ndarray, slope_factor: float
) -> int:
    if len(alphas) < 2:
        return max(voters, key=lambda p: (decisive[p], -p))
    penalty = slope_factor * alphas[-1]
    entered = [p for p in voters if p == 0 or alphas[p - 1] >= penalty]
    if not entered:
        return max(voters, key=lambda p: (decisive[p], -p))
    return max(entered)


def parabolic_refinement(
    contrast: Callable[[np.ndarray], np.ndarray], tau: float, mesh: float
) -> float:
    """Vertex of the parabola through the contrast at tau - mesh, tau, tau + mesh.

    The offset is clamped to one mesh; a non-concave triple leaves tau unchanged.
    """
    below, center, above = contrast(np.array([tau - mesh, tau, tau + mesh]))
    curvature = below - 2.0 * center + above
    if not curvature < 0:
        return tau
    offset = 0.5 * mesh * (below - above) / curvature
    return tau + float(np.clip(offset, -mesh, mesh))


def estimate_shift(
    row: np.ndarray, config: EstimationConfig, warn_degenerate: bool = True
) -> ShiftEstimate:
    """Adaptive estimate of the location of one curve.

    A degenerate contrast raises a RuntimeWarning unless warn_degenerate is False;
    callers running in worker threads count degenerate curves instead.
    """
    row = np.asarray(row, dtype=float)
    K_grid = config.K_grid_for(len(row))
    spectrum = spectral.empirical_spectrum(
        row, max(K_grid), center=True, method=config.spectrum_method
    )
    profile = criterion_profile(spectrum, config.tau_grid, K_grid, config.beta)
    hull = hull_path(profile)
    estimate = select_shift(profile, hull, config.alpha0_cap)
    if estimate.degenerate and warn_degenerate:
        warnings.warn("degenerate contrast: estimate set to the first maximizer", RuntimeWarning)
    if config.refine and not estimate.degenerate:
        winning_filter = filters.make_pinsker_filter(estimate.selected_K, config.beta)
        refined = parabolic_refinement(
            lambda taus: spectral.criterion_from_spectrum(spectrum, winning_filter, taus),
            estimate.tau_star,
            config.tau_grid.mesh,
        )
        estimate = dataclasses.replace(estimate, refined=refined)
    return estimate


def estimate_shift_fixed_filter(
    row: np.ndarray,
    weight_filter: Filter,
    tau_grid: TauGrid,
    refine: bool = False,
    method: str = spectral.FFT,
) -> float:
    """Argmax over the grid of the contrast of a fixed filter, optionally refined."""
    row = np.asarray(row, dtype=float)
    K = weight_filter.support
    if K == 0:
        return float(tau_grid.points[0])
    spectrum = spectral.empirical_spectrum(row, K, center=True, method=method)

    def contrast(taus):
        return spectral.criterion_from_spectrum(spectrum, weight_filter, taus)

    tau = float(tau_grid.points[utils.first_argmax(contrast(tau_grid.points))])
    if refine:
        tau = parabolic_refinement(contrast, tau, tau_grid.mesh)
    return tau


def estimate_shifts_panel(
    panel: signal_model.CurvePanel, config: EstimationConfig, workers: int = 1
) -> List[ShiftEstimate]:
    """Runs estimate_shift on every curve. A failing curve yields ShiftEstimate.failed."""

    def one_curve(j: int) -> ShiftEstimate:
        try:
            return estimate_shift(panel.values[j], config, warn_degenerate=False)
        except (SdtError, ValueError, FloatingPointError) as error:
            logger.warning("curve %s failed: %s", panel.curve_ids[j], error)
            return ShiftEstimate.failed(str(error))

    estimates = utils.parallel_map(one_curve, range(panel.n_curves), workers)
    degenerate = sum(1 for estimate in estimates if estimate.degenerate)
    if degenerate:
        logger.warning("%d of %d curves have a degenerate contrast", degenerate, len(estimates))
    return estimates


def baseline_crosscorr_shift(
    row: np.ndarray, reference: np.ndarray, tau_grid: TauGrid
) -> float:
    """Argmax over the grid of (1/n) sum_i Y_i ref(t_i - tau).

    The reference is interpolated linearly and periodically between its samples.
    """
    row = np.asarray(row, dtype=float)
    reference = np.asarray(reference, dtype=float)
    if row.shape != reference.shape:
        raise InvalidArgumentError("row and reference must share a grid")
    points = signal_model.TimeGrid(len(row)).points
    taus = tau_grid.points
    # shifted[a, i] = ref(t_i - tau_a)
    shifted = np.interp(points[None, :] - taus[:, None], points, reference, period=1.0)
    correlation = shifted @ row / len(row)
    return float(taus[utils.first_argmax(correlation)])


@dataclasses.dataclass(frozen=True)
class IdentifiabilityReport:
    """Checks behind the identifiability of the shift model.

    Attributes:
        grid_diameter: tau_max - tau_min.
        within_half_period: grid_diameter <= 1/2.
        tau0: Support bound of the shift law, when given.
        f1_squared: f_1^2; zero means the signal has a smaller period.
        second_deriv_norm_sq: ||f''||^2 over the stored harmonics.
        sum_k2_abs_fk: sum k^2 |f_k|, the bias condition constant.
    """

    grid_diameter: float
    within_half_period: bool
    tau0: Optional[float]
    f1_squared: float
    second_deriv_norm_sq: float
    sum_k2_abs_fk: float


def identifiability_report(
    signal: signal_model.Signal,
    tau_grid: TauGrid,
    dist: Optional[signal_model.ShiftDistribution] = None,
) -> IdentifiabilityReport:
    diagnostics = signal_model.signal_class_diagnostics(signal)
    diameter = tau_grid.tau_max - tau_grid.tau_min
    return IdentifiabilityReport(
        grid_diameter=diameter,
        within_half_period=diameter <= constants.MAX_GRID_DIAMETER + 1e-12,
        tau0=dist.tau0 if dist is not None else None,
        f1_squared=diagnostics.f1_squared,
        second_deriv_norm_sq=diagnostics.second_deriv_norm_sq,
        sum_k2_abs_fk=diagnostics.sum_k2_abs_fk,
    )

""" Empirical trigonometric coefficients and the Fourier contrast.

For a curve Y observed at t_i = i/n,

    x_k  = (1/n) sum_i sqrt(2) cos(2 pi k t_i) Y_i
    x*_k = (1/n) sum_i sqrt(2) sin(2 pi k t_i) Y_i

and the contrast of a filter h at a candidate shift tau is

    sum_k h_k [cos(2 pi k tau) x_k + sin(2 pi k tau) x*_k]^2,

which equals sum_k h_k [(1/n) sum_i sqrt(2) cos(2 pi k (t_i - tau)) Y_i]^2.
"""

import dataclasses
from typing import Tuple, Union

import numpy as np

from . import constants, signal_model
from .errors import InvalidArgumentError
from .filters import Filter

FFT = "fft"
DIRECT = "direct"


@dataclasses.dataclass(frozen=True, eq=False)
class EmpiricalSpectrum:
    """Cosine and sine coefficients x_k, x*_k for k = 1..K_max of one curve."""

    cos_coeffs: np.ndarray
    sin_coeffs: np.ndarray
    n: int

    @property
    def K_max(self) -> int:
        return len(self.cos_coeffs)


@dataclasses.dataclass(frozen=True, eq=False)
class DiscreteCoefficients:
    """Riemann-sum approximations of the Fourier coefficients of f(. - theta)."""

    fhat: np.ndarray
    ghat: np.ndarray
    theta: float
    n: int


def nyquist_bound(n: int) -> int:
    return (n - 1) // 2


def check_cutoff(K: int, n: int):
    if n < constants.MIN_SAMPLES:
        raise InvalidArgumentError(f"n must be >= {constants.MIN_SAMPLES}, got {n}")
    if K < 1 or K > nyquist_bound(n):
        raise InvalidArgumentError(
            f"harmonic cutoff {K} outside [1, {nyquist_bound(n)}] "
            f"(Nyquist bound floor((n-1)/2) for n={n})"
        )


def _basis(points: np.ndarray, K: int) -> Tuple[np.ndarray, np.ndarray]:
    phase = constants.TWO_PI * np.outer(points, np.arange(1, K + 1))
    return np.cos(phase), np.sin(phase)


def empirical_spectrum(
    row: np.ndarray, K_max: int, center: bool = True, method: str = FFT
) -> EmpiricalSpectrum:
    """Computes x_k and x*_k, k = 1..K_max, of a curve sampled at t_i = i/n.

    Args:
        row: The n samples Y_1..Y_n.
        K_max: Harmonic cutoff, at most floor((n-1)/2).
        center: Subtract the empirical mean first.
        method: "fft" (O(n log n)) or "direct" (O(nK) reference summation).
    """
    row = np.asarray(row, dtype=float)
    n = len(row)
    check_cutoff(K_max, n)
    if center:
        row = row - np.mean(row)

    if method == FFT:
        # sample i sits at t_i = i/n, so t_n = 1 lands on the zero frequency origin
        transform = np.fft.rfft(np.roll(row, 1))[1 : K_max + 1]
        cos_coeffs = constants.SQRT2 * transform.real / n
        sin_coeffs = -constants.SQRT2 * transform.imag / n
    elif method == DIRECT:
        cosines, sines = _basis(signal_model.TimeGrid(n).points, K_max)
        cos_coeffs = constants.SQRT2 * (row @ cosines) / n
        sin_coeffs = constants.SQRT2 * (row @ sines) / n
    else:
        raise InvalidArgumentError(f"unknown spectrum method {method!r}")
    return EmpiricalSpectrum(cos_coeffs, sin_coeffs, n)


def discrete_signal_coefficients(
    signal: signal_model.Signal, theta: float, n: int, K: int
) -> DiscreteCoefficients:
    """f-hat_k = (1/n) sum_i sqrt(2) cos(2 pi k (t_i - theta)) f(t_i - theta), g-hat_k with sine.

    Phases are measured from the signal's symmetry axis.
    """
    check_cutoff(K, n)
    shifted = signal_model.TimeGrid(n).points - theta
    values = signal_model.eval_signal(signal, shifted)
    cosines, sines = _basis(shifted - signal.axis, K)
    return DiscreteCoefficients(
        constants.SQRT2 * (values @ cosines) / n,
        constants.SQRT2 * (values @ sines) / n,
        theta,
        n,
    )


def discretization_terms(
    signal: signal_model.Signal, theta: float, n: int, K: int
) -> Tuple[np.ndarray, np.ndarray]:
    """The differences between the discrete and exact shifted coefficients.

    d_k  = (1/n) sum_i sqrt(2) cos(2 pi k t_i) f(t_i - theta) - cos(2 pi k theta) f_k
    d*_k = (1/n) sum_i sqrt(2) sin(2 pi k t_i) f(t_i - theta) - sin(2 pi k theta) f_k

    with theta the location axis + shift.
    """
    check_cutoff(K, n)
    points = signal_model.TimeGrid(n).points
    values = signal_model.eval_signal(signal, points - theta)
    cosines, sines = _basis(points, K)
    location = theta + signal.axis
    k = np.arange(1, K + 1)
    exact = signal_model.signal_coefficients(signal, K)
    d = constants.SQRT2 * (values @ cosines) / n - np.cos(constants.TWO_PI * k * location) * exact
    d_star = (
        constants.SQRT2 * (values @ sines) / n
        - np.sin(constants.TWO_PI * k * location) * exact
    )
    return d, d_star


def brute_force_criterion(row: np.ndarray, weight_filter: Filter, tau: float) -> float:
    """The contrast by direct double summation over samples and harmonics."""
    row = np.asarray(row, dtype=float)
    n = len(row)
    K = weight_filter.support
    if K == 0:
        return 0.0
    check_cutoff(K, n)
    cosines, _ = _basis(signal_model.TimeGrid(n).points - tau, K)
    averages = constants.SQRT2 * (row @ cosines) / n
    return float(np.sum(weight_filter.weights[:K] * averages ** 2))


def shifted_averages(spectrum: EmpiricalSpectrum, K: int, taus: np.ndarray) -> np.ndarray:
    """cos(2 pi k tau) x_k + sin(2 pi k tau) x*_k for every tau (rows) and k = 1..K (columns)."""
    if K > spectrum.K_max:
        raise InvalidArgumentError(
            f"filter support {K} exceeds the spectrum cutoff {spectrum.K_max}"
        )
    cosines, sines = _basis(np.atleast_1d(np.asarray(taus, dtype=float)), K)
    return cosines * spectrum.cos_coeffs[:K] + sines * spectrum.sin_coeffs[:K]


def criterion_from_spectrum(
    spectrum: EmpiricalSpectrum, weight_filter: Filter, tau: Union[float, np.ndarray]
):
    """The contrast at tau (scalar or array) in O(K) per point from a precomputed spectrum."""
    K = weight_filter.support
    scalar = np.ndim(tau) == 0
    if K == 0:
        return 0.0 if scalar else np.zeros(np.shape(tau))
    values = shifted_averages(spectrum, K, tau) ** 2 @ weight_filter.weights[:K]
    return float(values[0]) if scalar else values


def criterion_table(
    spectrum: EmpiricalSpectrum, weights: np.ndarray, taus: np.ndarray
) -> np.ndarray:
    """Contrast of several filters at several shifts.

    Args:
        spectrum: The curve's spectrum.
        weights: Array (F, L) of F filters zero padded to a common width L <= K_max.
        taus: The m candidate shifts.

    Returns:
        Array (F, m).
    """
    width = weights.shape[1]
    return weights @ (shifted_averages(spectrum, width, taus) ** 2).T

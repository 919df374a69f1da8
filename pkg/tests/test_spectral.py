import math

import numpy as np
import pytest

import sdt.filters
import sdt.signal_model
import sdt.spectral
from sdt.errors import InvalidArgumentError


@pytest.mark.parametrize("n,expected", [(4, 1), (5, 2), (100, 49), (101, 50)])
def test_nyquist_bound(n, expected):
    assert sdt.spectral.nyquist_bound(n) == expected


@pytest.mark.parametrize("K,n", [(0, 100), (50, 100), (1, 3)])
def test_check_cutoff_invalid(K, n):
    with pytest.raises(InvalidArgumentError):
        sdt.spectral.check_cutoff(K, n)


def test_empirical_spectrum_fft_matches_direct(random_row):
    row = random_row(101, seed=3)
    fft = sdt.spectral.empirical_spectrum(row, 50, method=sdt.spectral.FFT)
    direct = sdt.spectral.empirical_spectrum(row, 50, method=sdt.spectral.DIRECT)

    np.testing.assert_allclose(fft.cos_coeffs, direct.cos_coeffs, atol=1e-12)
    np.testing.assert_allclose(fft.sin_coeffs, direct.sin_coeffs, atol=1e-12)
    assert fft.K_max == 50
    assert fft.n == 101


def test_empirical_spectrum_single_harmonic(single_harmonic):
    n = 64
    row = sdt.signal_model.eval_signal(single_harmonic, sdt.signal_model.TimeGrid(n).points)
    spectrum = sdt.spectral.empirical_spectrum(row, 5)

    np.testing.assert_allclose(spectrum.cos_coeffs, [1.0, 0.0, 0.0, 0.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(spectrum.sin_coeffs, np.zeros(5), atol=1e-12)


def test_empirical_spectrum_centering_removes_constant(random_row):
    row = random_row(40)
    shifted = sdt.spectral.empirical_spectrum(row + 7.0, 10)
    original = sdt.spectral.empirical_spectrum(row, 10)
    np.testing.assert_allclose(shifted.cos_coeffs, original.cos_coeffs, atol=1e-12)


def test_parseval_bound(random_row):
    row = random_row(101, seed=8)
    centered = row - row.mean()
    full = sdt.spectral.empirical_spectrum(row, 50)
    partial = sdt.spectral.empirical_spectrum(row, 20)

    energy = np.mean(centered ** 2)
    assert np.sum(full.cos_coeffs ** 2 + full.sin_coeffs ** 2) == pytest.approx(energy, rel=1e-12)
    assert np.sum(partial.cos_coeffs ** 2 + partial.sin_coeffs ** 2) <= energy


def test_contrast_bounded_by_energy(random_row):
    row = random_row(100, seed=9)
    spectrum = sdt.spectral.empirical_spectrum(row, 30)
    taus = np.linspace(-0.5, 0.5, 101)

    values = sdt.spectral.criterion_from_spectrum(
        spectrum, sdt.filters.make_projection_filter(30), taus
    )
    assert np.all(values <= np.mean((row - row.mean()) ** 2) + 1e-12)


def test_empirical_spectrum_unknown_method(random_row):
    with pytest.raises(InvalidArgumentError):
        sdt.spectral.empirical_spectrum(random_row(20), 3, method="slow")


def test_criterion_matches_brute_force():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        n = int(rng.integers(8, 200))
        row = rng.standard_normal(n) + rng.uniform(-1.0, 1.0)
        K = int(rng.integers(1, sdt.spectral.nyquist_bound(n) + 1))
        if rng.random() < 0.5:
            weight_filter = sdt.filters.make_pinsker_filter(K, float(rng.uniform(0.5, 4.0)))
        else:
            weight_filter = sdt.filters.make_custom_filter(rng.random(K))
        tau = float(rng.uniform(-0.5, 0.5))
        spectrum = sdt.spectral.empirical_spectrum(row, K, center=False)

        brute = sdt.spectral.brute_force_criterion(row, weight_filter, tau)
        fast = sdt.spectral.criterion_from_spectrum(spectrum, weight_filter, tau)
        assert fast == pytest.approx(brute, rel=1e-10, abs=1e-10)


def test_criterion_from_spectrum_vectorized(random_row):
    row = random_row(50)
    weight_filter = sdt.filters.make_pinsker_filter(10)
    spectrum = sdt.spectral.empirical_spectrum(row, 10)
    taus = np.array([-0.2, 0.0, 0.3])

    values = sdt.spectral.criterion_from_spectrum(spectrum, weight_filter, taus)

    assert values.shape == (3,)
    for tau, value in zip(taus, values):
        assert value == pytest.approx(
            sdt.spectral.criterion_from_spectrum(spectrum, weight_filter, float(tau))
        )


def test_criterion_zero_filter(random_row):
    spectrum = sdt.spectral.empirical_spectrum(random_row(20), 5)
    zero = sdt.filters.make_custom_filter([0.0, 0.0])
    assert sdt.spectral.criterion_from_spectrum(spectrum, zero, 0.1) == 0.0
    assert sdt.spectral.brute_force_criterion(random_row(20), zero, 0.1) == 0.0


def test_criterion_filter_longer_than_spectrum(random_row):
    spectrum = sdt.spectral.empirical_spectrum(random_row(50), 5)
    with pytest.raises(InvalidArgumentError):
        sdt.spectral.criterion_from_spectrum(
            spectrum, sdt.filters.make_projection_filter(6), 0.0
        )


def test_criterion_table_rows_match_single_filters(random_row):
    spectrum = sdt.spectral.empirical_spectrum(random_row(100), 20)
    K_grid = [3, 8, 20]
    taus = np.linspace(-0.25, 0.25, 11)
    table = sdt.spectral.criterion_table(
        spectrum, sdt.filters.pinsker_weight_matrix(K_grid, 3.0, 20), taus
    )

    assert table.shape == (3, 11)
    for row, K in zip(table, K_grid):
        np.testing.assert_allclose(
            row,
            sdt.spectral.criterion_from_spectrum(
                spectrum, sdt.filters.make_pinsker_filter(K), taus
            ),
            rtol=1e-12,
            atol=1e-14,
        )


def test_noise_free_contrast_peaks_at_shift(single_harmonic):
    n = 100
    row = sdt.signal_model.eval_signal(
        single_harmonic, sdt.signal_model.TimeGrid(n).points - 0.07
    )
    spectrum = sdt.spectral.empirical_spectrum(row, 5)
    taus = np.linspace(-0.25, 0.25, 101)
    values = sdt.spectral.criterion_from_spectrum(
        spectrum, sdt.filters.make_projection_filter(5), taus
    )
    assert taus[np.argmax(values)] == pytest.approx(0.07)


def test_discretization_identity(half_sine):
    theta, n, K = 0.07, 100, 20
    discrete = sdt.spectral.discrete_signal_coefficients(half_sine, theta, n, K)
    d, d_star = sdt.spectral.discretization_terms(half_sine, theta, n, K)
    exact = sdt.signal_model.signal_coefficients(half_sine, K)
    phase = 2 * math.pi * np.arange(1, K + 1) * theta

    np.testing.assert_allclose(
        np.cos(phase) * (discrete.fhat - exact) - np.sin(phase) * discrete.ghat, d, atol=1e-12
    )
    np.testing.assert_allclose(
        np.sin(phase) * (discrete.fhat - exact) + np.cos(phase) * discrete.ghat,
        d_star,
        atol=1e-12,
    )


def test_discretization_terms_vanish_for_band_limited_signal(single_harmonic):
    d, d_star = sdt.spectral.discretization_terms(single_harmonic, 0.13, 64, 10)
    np.testing.assert_allclose(d, np.zeros(10), atol=1e-12)
    np.testing.assert_allclose(d_star, np.zeros(10), atol=1e-12)


def test_discrete_coefficients_first_harmonic(half_sine):
    discrete = sdt.spectral.discrete_signal_coefficients(half_sine, 0.0, 100, 1)
    f1 = -(2 * math.sqrt(2) / math.pi) / 3
    assert abs(discrete.fhat[0] - f1) <= 10 / 100


def _discretization_error(signal, n, K):
    discrete = sdt.spectral.discrete_signal_coefficients(signal, 0.0, n, K)
    return np.abs(discrete.fhat - sdt.signal_model.signal_coefficients(signal, K))


def test_discretization_error_bound(half_sine):
    sweep = [50, 100, 200, 400]
    k = {n: np.arange(1, n // 4 + 1) for n in sweep}
    bound = {n: np.max(n * _discretization_error(half_sine, n, n // 4) / k[n]) for n in sweep}

    # one constant covers the whole sweep
    assert max(bound.values()) <= 0.1
    # n |f_hat_k - f_k| / k stays bounded, and in fact decays like 1/n for this signal
    assert all(bound[n] <= bound[sweep[0]] for n in sweep)
    scaled = [n * bound[n] for n in sweep]
    assert max(scaled) / min(scaled) < 1.5


def test_discretization_error_halving(half_sine):
    coarse = np.max(_discretization_error(half_sine, 100, 5))
    fine = np.max(_discretization_error(half_sine, 200, 5))
    # the Riemann sum of a periodic signal converges at second order
    assert 0.2 <= fine / coarse <= 0.3

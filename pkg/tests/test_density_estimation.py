import math

import numpy as np
import pytest
from scipy import integrate

import sdt.density_estimation
import sdt.signal_model
from sdt.errors import DegenerateInputError, InvalidArgumentError


@pytest.fixture
def bimodal_points():
    return sdt.signal_model.sample_shifts(sdt.signal_model.bimodal_shifts(), 200, 9)


def test_kernel_values():
    assert sdt.density_estimation.kernel_eval(
        sdt.density_estimation.EPANECHNIKOV_KERNEL, 0.0
    ) == pytest.approx(0.75)
    assert sdt.density_estimation.kernel_eval(
        sdt.density_estimation.GAUSSIAN_KERNEL, 0.0
    ) == pytest.approx(0.398942, abs=1e-6)
    np.testing.assert_array_equal(
        sdt.density_estimation.kernel_eval(
            sdt.density_estimation.EPANECHNIKOV_KERNEL, np.array([-1.5, 1.0, 2.0])
        ),
        [0.0, 0.0, 0.0],
    )


def test_kernel_rejects_wrong_mass():
    with pytest.raises(InvalidArgumentError, match="integrates"):
        sdt.density_estimation.Kernel(
            "box2", lambda u: np.where(np.abs(u) <= 1.0, 1.0, 0.0), 1.0
        )


def test_kernel_rejects_wrong_order():
    def shifted_gaussian(u):
        return np.exp(-0.5 * (u - 0.5) ** 2) / math.sqrt(2 * math.pi)

    with pytest.raises(InvalidArgumentError, match="moment 1"):
        sdt.density_estimation.Kernel("shifted", shifted_gaussian, math.inf)


def test_kernel_nonnegative():
    assert sdt.density_estimation.GAUSSIAN_KERNEL.nonnegative
    assert sdt.density_estimation.EPANECHNIKOV_KERNEL.nonnegative


@pytest.mark.parametrize(
    "kernel", [sdt.density_estimation.GAUSSIAN_KERNEL, sdt.density_estimation.EPANECHNIKOV_KERNEL]
)
@pytest.mark.parametrize("a", [0.0, 0.5, 1.3])
def test_self_convolution_closed_form(kernel, a):
    if math.isinf(kernel.support):
        low, high = -12.0, 12.0
    else:
        low, high = max(-1.0, a - 1.0), min(1.0, a + 1.0)
    numeric, _ = integrate.quad(
        lambda x: float(kernel.function(np.asarray(x)) * kernel.function(np.asarray(a - x))),
        low,
        high,
        limit=200,
    )
    assert float(kernel.self_convolution(np.asarray(a))) == pytest.approx(numeric, rel=1e-8)


def test_get_kernel():
    assert sdt.density_estimation.get_kernel("gaussian") is sdt.density_estimation.GAUSSIAN_KERNEL
    with pytest.raises(InvalidArgumentError):
        sdt.density_estimation.get_kernel("triweight")


def test_kde_single_point():
    estimate = sdt.density_estimation.kde(
        [0.0], sdt.density_estimation.EPANECHNIKOV_KERNEL, 0.5, [0.0, 0.25, 1.0]
    )
    np.testing.assert_allclose(estimate.values, [1.5, 1.5 * 0.75, 0.0])
    assert estimate.J == 1
    assert estimate.h == 0.5
    assert estimate.kernel_id == "epanechnikov"


def test_kde_default_grid_integrates_to_one(bimodal_points):
    estimate = sdt.density_estimation.kde(
        bimodal_points, sdt.density_estimation.EPANECHNIKOV_KERNEL, 0.05
    )

    assert len(estimate.x_grid) == 201
    assert estimate.x_grid[0] == pytest.approx(bimodal_points.min() - 0.15)
    assert estimate.x_grid[-1] == pytest.approx(bimodal_points.max() + 0.15)
    assert estimate.integral() == pytest.approx(1.0, abs=1e-3)
    assert np.all(estimate.values >= 0)


@pytest.mark.parametrize(
    "kernel", [sdt.density_estimation.GAUSSIAN_KERNEL, sdt.density_estimation.EPANECHNIKOV_KERNEL]
)
def test_kde_location_equivariance(bimodal_points, kernel):
    x_grid = np.linspace(-0.3, 0.3, 61)
    base = sdt.density_estimation.kde(bimodal_points, kernel, 0.03, x_grid)
    moved = sdt.density_estimation.kde(bimodal_points + 0.125, kernel, 0.03, x_grid + 0.125)

    np.testing.assert_allclose(moved.values, base.values, atol=1e-12)


def test_kde_epanechnikov_mass_on_padded_range(bimodal_points):
    h = 0.05
    x_grid = np.arange(bimodal_points.min() - h, bimodal_points.max() + h + h / 100, h / 50)
    estimate = sdt.density_estimation.kde(
        bimodal_points, sdt.density_estimation.EPANECHNIKOV_KERNEL, h, x_grid
    )

    assert integrate.trapezoid(estimate.values, estimate.x_grid) == pytest.approx(1.0, abs=1e-3)


@pytest.mark.parametrize("h", [0.0, -0.1, math.nan])
def test_kde_invalid_bandwidth(h):
    with pytest.raises(InvalidArgumentError):
        sdt.density_estimation.kde([0.0, 0.1], sdt.density_estimation.GAUSSIAN_KERNEL, h)


def test_kde_invalid_points():
    with pytest.raises(InvalidArgumentError):
        sdt.density_estimation.kde([], sdt.density_estimation.GAUSSIAN_KERNEL, 0.1)
    with pytest.raises(InvalidArgumentError):
        sdt.density_estimation.kde([0.0, math.inf], sdt.density_estimation.GAUSSIAN_KERNEL, 0.1)


def test_bandwidth_theoretical_regimes():
    assert sdt.density_estimation.bandwidth_theoretical(1000, 10, 2.0) == pytest.approx(
        0.2512, abs=1e-4
    )
    assert sdt.density_estimation.bandwidth_theoretical(100, 10 ** 6, 2.0) == pytest.approx(
        0.4635, abs=1e-3
    )


def test_bandwidth_theoretical_invalid():
    with pytest.raises(InvalidArgumentError):
        sdt.density_estimation.bandwidth_theoretical(1000, 10, 1.0)
    with pytest.raises(InvalidArgumentError):
        sdt.density_estimation.bandwidth_theoretical(1000, 0, 2.0)


def test_bandwidth_rate():
    assert sdt.density_estimation.bandwidth_rate(1, 2.0, 0.08) == pytest.approx(0.08)
    assert sdt.density_estimation.bandwidth_rate(32, 2.0, 0.08) == pytest.approx(0.04)
    with pytest.raises(InvalidArgumentError):
        sdt.density_estimation.bandwidth_rate(10, 2.0, 0.0)


def test_lscv_score_two_points():
    kernel = sdt.density_estimation.EPANECHNIKOV_KERNEL
    self_convolution_half = 3.0 / 160.0 * 1.5 ** 3 * (0.25 + 3.0 + 4.0)
    integral_of_square = (2 * 0.6 + 2 * self_convolution_half) / 4
    leave_one_out = 0.75 * (1 - 0.25)

    assert sdt.density_estimation.lscv_score([0.0, 0.5], kernel, 1.0) == pytest.approx(
        integral_of_square - 2 * leave_one_out
    )


def test_lscv_score_quadrature_matches_closed_form(bimodal_points):
    # pylint: disable=protected-access
    numeric_kernel = sdt.density_estimation.Kernel(
        "epanechnikov-numeric", sdt.density_estimation._epanechnikov, 1.0
    )
    closed = sdt.density_estimation.lscv_score(
        bimodal_points, sdt.density_estimation.EPANECHNIKOV_KERNEL, 0.04
    )
    numeric = sdt.density_estimation.lscv_score(bimodal_points, numeric_kernel, 0.04)
    assert numeric == pytest.approx(closed, rel=1e-3)


def _direct_lscv(points, kernel, h):
    J = len(points)
    reach = 1.0 if kernel is sdt.density_estimation.EPANECHNIKOV_KERNEL else 12.0
    square = 0.0
    for a in points:
        for b in points:
            low, high = max(a, b) - reach * h, min(a, b) + reach * h
            if low < high:
                value, _ = integrate.quad(
                    lambda x, a=a, b=b: float(
                        kernel.function((x - a) / h) * kernel.function((x - b) / h)
                    ),
                    low,
                    high,
                    epsabs=1e-13,
                    epsrel=1e-12,
                )
                square += value
    square /= J * J * h * h
    cross = sum(
        float(kernel.function((a - b) / h))
        for i, a in enumerate(points)
        for k, b in enumerate(points)
        if i != k
    )
    return square - 2.0 * cross / (J * (J - 1) * h)


@pytest.mark.parametrize(
    "kernel", [sdt.density_estimation.GAUSSIAN_KERNEL, sdt.density_estimation.EPANECHNIKOV_KERNEL]
)
def test_lscv_score_matches_double_sum(kernel):
    points = [-0.04, 0.01, 0.05]
    h = 0.06

    assert sdt.density_estimation.lscv_score(points, kernel, h) == pytest.approx(
        _direct_lscv(points, kernel, h), abs=1e-8
    )


def test_bandwidth_lscv_selects_from_grid(bimodal_points):
    grid = np.geomspace(0.005, 0.2, 30)
    h = sdt.density_estimation.bandwidth_lscv(
        bimodal_points, sdt.density_estimation.EPANECHNIKOV_KERNEL, grid
    )

    assert h in grid
    assert 0.005 < h < 0.2


def test_bandwidth_lscv_degenerate_inputs():
    kernel = sdt.density_estimation.GAUSSIAN_KERNEL
    with pytest.raises(DegenerateInputError):
        sdt.density_estimation.bandwidth_lscv([0.1, 0.1, 0.1], kernel, [0.01, 0.1])
    with pytest.raises(InvalidArgumentError):
        sdt.density_estimation.bandwidth_lscv([0.1, 0.2, 0.1], kernel, [0.01, 0.1])
    with pytest.raises(InvalidArgumentError):
        sdt.density_estimation.bandwidth_lscv([0.1, 0.2, 0.3], kernel, [])


def test_bandwidth_lscv_single_candidate_warns():
    with pytest.warns(RuntimeWarning):
        h = sdt.density_estimation.bandwidth_lscv(
            [0.1, 0.2, 0.3], sdt.density_estimation.GAUSSIAN_KERNEL, [0.05]
        )
    assert h == 0.05


@pytest.mark.parametrize(
    "text,expected",
    [
        ("theoretical:2", sdt.density_estimation.BandwidthPolicy("theoretical", beta=2.0)),
        (
            "lscv:0.005:0.2:30",
            sdt.density_estimation.BandwidthPolicy("lscv", h_min=0.005, h_max=0.2, count=30),
        ),
        ("fixed:0.03", sdt.density_estimation.BandwidthPolicy("fixed", h=0.03)),
        ("rate:2:0.08", sdt.density_estimation.BandwidthPolicy("rate", beta=2.0, scale=0.08)),
    ],
)
def test_parse_bandwidth_policy(text, expected):
    policy = sdt.density_estimation.parse_bandwidth_policy(text)
    assert policy == expected
    assert policy.describe() == text


@pytest.mark.parametrize(
    "text",
    ["silverman", "theoretical:1", "lscv:0.2:0.1:30", "lscv:0.01:0.1:2.5", "fixed:-1", "rate:2", "fixed:abc"],
)
def test_parse_bandwidth_policy_invalid(text):
    with pytest.raises(InvalidArgumentError):
        sdt.density_estimation.parse_bandwidth_policy(text)


def test_select_bandwidth(bimodal_points):
    kernel = sdt.density_estimation.EPANECHNIKOV_KERNEL
    parse = sdt.density_estimation.parse_bandwidth_policy

    assert sdt.density_estimation.select_bandwidth(parse("fixed:0.03"), bimodal_points, kernel) == 0.03
    assert sdt.density_estimation.select_bandwidth(
        parse("theoretical:2"), bimodal_points, kernel, n=1000
    ) == pytest.approx(sdt.density_estimation.bandwidth_theoretical(1000, 200, 2.0))
    assert sdt.density_estimation.select_bandwidth(
        parse("rate:2:0.08"), bimodal_points, kernel
    ) == pytest.approx(0.08 * 200 ** -0.2)
    with pytest.raises(InvalidArgumentError):
        sdt.density_estimation.select_bandwidth(parse("theoretical:2"), bimodal_points, kernel)


def test_empirical_measure_apply():
    assert sdt.density_estimation.empirical_measure_apply(
        [0.1, 0.3], lambda x: x
    ) == pytest.approx(0.2)
    assert sdt.density_estimation.empirical_measure_apply([0.1, 0.3], lambda x: 1.0) == 1.0


def test_find_modes_threshold():
    estimate = sdt.density_estimation.DensityEstimate(
        x_grid=np.arange(7.0),
        values=np.array([0.0, 1.0, 0.0, 0.05, 0.0, 2.0, 0.0]),
        h=1.0,
        kernel_id="epanechnikov",
        J=1,
    )
    np.testing.assert_array_equal(sdt.density_estimation.find_modes(estimate), [1.0, 5.0])
    assert sdt.density_estimation.count_modes(estimate) == 2
    assert sdt.density_estimation.count_modes(estimate, relative_threshold=0.0) == 2
    assert sdt.density_estimation.count_modes(estimate, relative_threshold=0.0, prominence=0.0) == 3


def test_find_modes_ignores_ripples_inside_a_bump():
    estimate = sdt.density_estimation.DensityEstimate(
        x_grid=np.arange(10.0),
        values=np.array([0.0, 1.0, 0.9, 0.95, 0.5, 0.05, 0.6, 1.0, 0.6, 0.0]),
        h=1.0,
        kernel_id="epanechnikov",
        J=1,
    )

    np.testing.assert_array_equal(sdt.density_estimation.find_modes(estimate), [1.0, 7.0])
    np.testing.assert_array_equal(
        sdt.density_estimation.find_modes(estimate, prominence=0.0), [1.0, 3.0, 7.0]
    )


def test_find_modes_skips_plateaus():
    estimate = sdt.density_estimation.DensityEstimate(
        np.arange(5.0), np.array([0.0, 1.0, 1.0, 0.0, 0.0]), 1.0, "gaussian", 1
    )
    assert sdt.density_estimation.count_modes(estimate) == 0


def test_find_modes_zero_density():
    estimate = sdt.density_estimation.DensityEstimate(
        np.arange(3.0), np.zeros(3), 1.0, "gaussian", 1
    )
    assert sdt.density_estimation.count_modes(estimate) == 0


def test_bimodal_sample_has_two_modes():
    points = sdt.signal_model.sample_shifts(sdt.signal_model.bimodal_shifts(), 2000, 9)
    estimate = sdt.density_estimation.kde(points, sdt.density_estimation.GAUSSIAN_KERNEL, 0.04)
    modes = sdt.density_estimation.find_modes(estimate)

    assert len(modes) == 2
    np.testing.assert_allclose(modes, [-0.1, 0.1], atol=0.03)

# pylint: disable=redefined-outer-name

import numpy as np
import pytest

import sdt.shift_estimation
import sdt.signal_model


def pytest_addoption(parser):
    parser.addoption(
        "--skip-slow",
        action="store_true",
        default=False,
        help="skip the Monte-Carlo acceptance runs",
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long Monte-Carlo acceptance run")


def pytest_collection_modifyitems(config, items):
    if not config.getoption("--skip-slow"):
        return
    skip_slow = pytest.mark.skip(reason="--skip-slow given")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def single_harmonic():
    return sdt.signal_model.single_harmonic_signal()


@pytest.fixture
def half_sine():
    return sdt.signal_model.half_sine_signal()


@pytest.fixture
def symmetric_tau_grid():
    return sdt.shift_estimation.TauGrid(-0.2, 0.2, 81)


@pytest.fixture
def random_row():
    def inner_random_row(n, seed=0):
        """A pure noise curve of n samples, reproducible from the seed."""
        return np.random.default_rng(seed).standard_normal(n)

    return inner_random_row


@pytest.fixture
def write_text(tmp_path):
    def inner_write_text(name, text):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return inner_write_text

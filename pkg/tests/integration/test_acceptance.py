""" Full Monte-Carlo runs of the bench suites. Skip with --skip-slow. """

import pytest

import sdt.constants
import sdt.suites


@pytest.mark.slow
@pytest.mark.parametrize(
    "suite",
    ["lemma24", "lemma23", "lemma25", "theorem32", "theorem33", "sim1", "illustration"],
)
def test_suite_passes(suite):
    rows = sdt.suites.run_suite(suite, seed=0)

    gated = [row for row in rows if row.status != sdt.constants.INFO]
    assert gated
    assert [row for row in gated if row.failed] == []


@pytest.mark.slow
def test_sim2_reports_only():
    rows = sdt.suites.run_suite("sim2", seed=0)

    assert {row.metric for row in rows} == {
        "mise",
        "pointwise_mse",
        "unimodal_rate",
        "mean_bandwidth",
    }

"""Tests for the AoA spectrum demo."""

import numpy as np
import pytest

from ssotfs_cli.experiments.aoa_demo import aoa_demo, demo_scenario
from ssotfs_cli.experiments.common import series_name


@pytest.fixture
def demo_config(make_config):
    return make_config(
        "aoa-demo",
        frame={"M": 4, "N": 4, "n_bs": 32},
        K=2,
        P=2,
        l_max=3,
        k_max=3,
        radar_snr_db=60,
        n_range_values=[0, 2],
        t_obs=2,
    )


def test_one_row_per_antenna(demo_config):
    table = aoa_demo(demo_config)
    assert table.series_names() == [series_name(n_range=0), series_name(n_range=2)]
    for name in table.series_names():
        rows = table.series(name)
        assert [row.x for row in rows] == list(range(1, 33))
        assert all(row.n_trials == 2 for row in rows)


def test_peaks_at_true_receive_indices(demo_config):
    table = aoa_demo(demo_config)
    truth = sorted(int(a) for a in table.metadata["true_rx_indices"].split())
    assert truth == sorted(demo_scenario(demo_config).rx_indices())
    for name in table.series_names():
        traces = np.array([row.metric for row in table.series(name)])
        peaks = sorted(int(a) + 1 for a in np.argsort(traces)[::-1][:4])
        assert peaks == truth


def test_noise_floor_matches_snr(demo_config):
    table = aoa_demo(demo_config)
    truth = {int(a) for a in table.metadata["true_rx_indices"].split()}
    rest = [row.metric for row in table.series(series_name(n_range=0)) if int(row.x) not in truth]
    assert np.median(rest) == pytest.approx(1e-6, rel=0.5)

"""Tests for the average-determinant experiment."""

import numpy as np
import pytest

from ssotfs_cli.experiments.common import series_name
from ssotfs_cli.experiments.det_eval import (
    BOUND_SERIES,
    DET_POLICIES,
    avg_determinant_experiment,
    determinants,
    draw_paths,
    exact_precoders,
)
from ssotfs_cli.harness.config import ExperimentConfig
from ssotfs_cli.phy.comm.effective import effective_shift
from ssotfs_cli.phy.otfs import FrameParams
from ssotfs_cli.utils.errors import ConfigurationError


@pytest.fixture
def det_config(make_config):
    return make_config("det-eval", trials=6, p_values=[2, 3], error_repeats=[1, 2])


class TestDrawPaths:
    def test_doppler_separation(self, rng):
        for _ in range(20):
            nu = np.array([p.nu for p in draw_paths(rng, 4, 2, 2, min_separation=0.2)])
            gaps = np.abs(nu[:, None] - nu[None, :])[np.triu_indices(4, 1)]
            assert gaps.min() >= 0.2

    def test_distinct_delays(self, rng):
        paths = draw_paths(rng, 5, 2, 2, distinct_delays=True)
        delays = [p.l for p in paths]
        assert len(set(delays)) == 5
        assert max(delays) <= 4

    def test_integer_doppler(self, rng):
        assert all(p.kappa == 0.0 for p in draw_paths(rng, 3, 2, 4, fractional=False))

    def test_infeasible_separation(self, rng):
        with pytest.raises(ConfigurationError):
            draw_paths(rng, 3, 2, 0, min_separation=0.5, fractional=False)


class TestExactPrecoders:
    def test_paths_collapse_to_distinct_virtual_taps(self, rng):
        params = FrameParams(M=8, N=8, n_bs=8)
        paths = draw_paths(rng, 4, 2, 2)
        shifts = [effective_shift(p, w, params) for p, w in zip(paths, exact_precoders(paths, params, rng))]
        assert all(s is not None and s.integer for s in shifts)
        assert len({(s.delay, round(s.doppler)) for s in shifts}) == 4


class TestDeterminants:
    def test_single_path_equals_bound(self, rng):
        params = FrameParams(M=8, N=8, n_bs=8)
        values = determinants(draw_paths(rng, 1, 2, 2), None, [1, 3], params)
        assert values == pytest.approx((8.0, 24.0))


class TestExperiment:
    def test_layout(self, det_config):
        table = avg_determinant_experiment(det_config)
        expected = [series_name(P=P, policy=p) for P in (2, 3) for p in (*DET_POLICIES, BOUND_SERIES)]
        assert sorted(table.series_names()) == sorted(expected)
        assert table.metadata["x"] == "d_e_sq"
        for row in table.series(series_name(P=3, policy=BOUND_SERIES)):
            assert row.metric == pytest.approx(row.x**3)
            assert row.n_trials == 0

    def test_mean_never_exceeds_bound(self, det_config):
        table = avg_determinant_experiment(det_config)
        for P in det_config.p_values:
            for policy in DET_POLICIES:
                rows = table.series(series_name(P=P, policy=policy))
                assert [r.x for r in rows] == [8.0, 16.0]
                for row in rows:
                    assert row.n_trials == det_config.trials
                    assert -1e-6 * row.x**P <= row.metric <= row.x**P * (1 + 1e-6)

    def test_seeded(self, det_config):
        first = avg_determinant_experiment(det_config).to_frame()
        second = avg_determinant_experiment(det_config).to_frame()
        assert first.equals(second)

    @pytest.mark.slow
    def test_worker_count_does_not_change_results(self, det_config):
        inline = avg_determinant_experiment(det_config)
        pooled = avg_determinant_experiment(det_config.with_overrides(threads=2))
        assert inline.to_frame().equals(pooled.to_frame())
        assert inline.metadata == pooled.metadata


@pytest.mark.slow
class TestOrdering:
    """Precoding raises the mean determinant towards ``(d_E^2)^P``."""

    @pytest.fixture(scope="class")
    def table(self):
        config = ExperimentConfig.from_dict(
            {"kind": "det-eval", "seed": 1, "frame": {"M": 8, "N": 8}, "trials": 400, "error_repeats": [1]}
        )
        return avg_determinant_experiment(config)

    def _mean(self, table, P, policy):
        (row,) = table.series(series_name(P=P, policy=policy))
        assert row.x == 8.0
        return row.metric

    def test_precoded_beats_unprecoded(self, table):
        for P in (3, 4, 5):
            assert self._mean(table, P, "precoded") >= self._mean(table, P, "random-delay")

    def test_gain_grows_with_paths(self, table):
        ratios = [self._mean(table, P, "precoded") / self._mean(table, P, "random-delay") for P in (3, 4, 5)]
        assert ratios == sorted(ratios)
        assert ratios[0] > 1.0

    def test_precoded_tracks_bound(self, table):
        for P in (3, 4, 5):
            assert 0.5 * 8.0**P <= self._mean(table, P, "precoded") <= 8.0**P * (1 + 1e-6)

"""AoA spectrum demo: per-partition covariance traces of one scenario."""

from functools import partial

import numpy as np

from ssotfs_cli.experiments.base_experiment import BaseExperiment
from ssotfs_cli.experiments.common import allocate_power, series_name, snr_to_noise
from ssotfs_cli.experiments.miss_detection import observe_traces
from ssotfs_cli.harness.config import ExperimentConfig
from ssotfs_cli.harness.results import ResultTable
from ssotfs_cli.phy.channel import Scenario, sample_scenario
from ssotfs_cli.phy.constellation import get_constellation
from ssotfs_cli.phy.radar import estimate_aoas
from ssotfs_cli.utils.parallel import map_trials
from ssotfs_cli.utils.rng import trial_rng


def demo_scenario(config: ExperimentConfig) -> Scenario:
    """The single scenario shared by every beam width of the demo."""
    return sample_scenario(
        config.frame,
        config.K,
        config.P,
        trial_rng(config.seed, 0),
        l_max=config.l_max,
        k_max=config.k_max,
        doppler=config.doppler,
        n_range=max(config.n_range_values),
    )


def _frame_traces(
    config: ExperimentConfig, scenario: Scenario, series: int, n_range: int, frame: int
) -> np.ndarray:
    power = allocate_power(scenario, config.power_allocation[0], n_range)
    n0_radar = snr_to_noise(config.frame.alpha_total, config.radar_snr_db)
    rng = trial_rng(config.seed, 1, series, frame)
    return observe_traces(scenario, power.alpha, n0_radar, 1, get_constellation(config.constellation), rng)


class AoaDemoExperiment(BaseExperiment):
    """Traces versus antenna index for each beam width in ``n_range_values``.

    Each row is one receive partition: ``x`` is the 1-based antenna index,
    ``metric`` the trace averaged over ``t_obs`` frames.
    """

    kind = "aoa-demo"

    def run(self) -> ResultTable:
        config = self.config
        scenario = demo_scenario(config)
        truth = sorted(scenario.rx_indices())
        table = self.new_table()
        table.metadata["x"] = "antenna_index"
        table.metadata["metric"] = "covariance_trace"
        table.metadata["radar_snr_db"] = f"{config.radar_snr_db:g}"
        table.metadata["true_rx_indices"] = " ".join(str(a) for a in truth)

        for series, n_range in enumerate(config.n_range_values):
            frames = map_trials(
                partial(_frame_traces, config, scenario, series, n_range),
                config.t_obs,
                workers=config.threads,
                progress=self.progress,
                desc=f"n_range={n_range}",
            )
            traces = np.mean(frames, axis=0)
            estimate = estimate_aoas(traces, config.K, config.P, config.frame.n_bs)
            self.logger.info(
                f"n_range={n_range}: detected {sorted(estimate.detected_rx_indices)}, "
                f"{'match' if estimate.matches(truth) else 'miss'}"
            )
            name = series_name(n_range=n_range)
            for antenna, trace in enumerate(traces, start=1):
                table.add(name, antenna, trace, config.t_obs)
        return table


def aoa_demo(config: ExperimentConfig, progress: bool = False) -> ResultTable:
    return AoaDemoExperiment(config, progress).run()

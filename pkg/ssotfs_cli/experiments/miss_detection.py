"""Miss-detection probability of the radar AoA estimator versus radar SNR."""

from functools import partial

import numpy as np

from ssotfs_cli.experiments.base_experiment import BaseExperiment
from ssotfs_cli.experiments.common import allocate_power, count_true, series_name, snr_to_noise
from ssotfs_cli.harness.config import ExperimentConfig
from ssotfs_cli.harness.results import ResultTable, wilson_interval
from ssotfs_cli.phy.channel import Scenario, apply_radar_channel, sample_scenario
from ssotfs_cli.phy.constellation import get_constellation
from ssotfs_cli.phy.radar import covariance_block_traces, estimate_aoas
from ssotfs_cli.phy.tx import PowerAllocation, full_tx_chain
from ssotfs_cli.utils.errors import ConfigurationError
from ssotfs_cli.utils.parallel import map_trials
from ssotfs_cli.utils.rng import trial_rng


def observe_traces(
    scenario: Scenario, alpha: PowerAllocation, n0_radar: float, t_obs: int, constellation, rng
) -> np.ndarray:
    """Covariance block traces of ``t_obs`` echo frames with fresh random symbols."""
    params = scenario.params
    frames = []
    for _ in range(t_obs):
        x = constellation.random_symbols(params.mn, rng)
        s = full_tx_chain(x, {}, alpha, params)
        frames.append(apply_radar_channel(scenario, s, n0_radar, rng))
    return covariance_block_traces(frames, params.n_bs)


def _miss_trial(config: ExperimentConfig, point: int, trial: int) -> tuple:
    """One scenario observed under every power policy; True marks a miss.

    All policies share the scenario, symbols and noise of the trial.
    """
    params = config.frame
    constellation = get_constellation(config.constellation)
    rng = trial_rng(config.seed, point, trial)
    scenario = sample_scenario(
        params,
        config.K,
        config.P,
        rng,
        l_max=config.l_max,
        k_max=config.k_max,
        doppler=config.doppler,
        n_range=config.n_range,
    )
    n0_radar = snr_to_noise(params.alpha_total, config.snr_db[point])
    truth = scenario.rx_indices()
    misses = []
    for policy in config.power_allocation:
        power = allocate_power(scenario, policy, config.n_range)
        frame_rng = trial_rng(config.seed, point, trial, 1)
        traces = observe_traces(scenario, power.alpha, n0_radar, config.t_obs, constellation, frame_rng)
        estimate = estimate_aoas(traces, config.K, config.P, params.n_bs)
        misses.append(not estimate.matches(truth))
    return tuple(misses)


def miss_detection_experiment(config: ExperimentConfig, progress: bool = False) -> ResultTable:
    """Empirical miss-detection probability per power policy and radar SNR point.

    A trial is a miss when the detected receive-index set differs from the
    true one. Rows carry Wilson 95% half widths.
    """
    return MissDetectionExperiment(config, progress).run()


class MissDetectionExperiment(BaseExperiment):
    kind = "miss-detection"

    def run(self) -> ResultTable:
        config = self.config
        if config.trials < 1:
            raise ConfigurationError("at least one trial per point is required", field="trials")
        table = self.new_table()
        table.metadata["x"] = "radar_snr_db"
        table.metadata["metric"] = "miss_detection_probability"
        self.logger.info(
            f"Miss detection: K={config.K} P={config.P} n_range={config.n_range} "
            f"{len(config.snr_db)} SNR points x {config.trials} trials"
        )

        counts = {policy: [] for policy in config.power_allocation}
        for point, snr in enumerate(config.snr_db):
            outcomes = map_trials(
                partial(_miss_trial, config, point),
                config.trials,
                workers=config.threads,
                progress=self.progress,
                desc=f"SNR {snr:g} dB",
            )
            for policy_index, policy in enumerate(config.power_allocation):
                misses = count_true([o[policy_index] for o in outcomes])
                counts[policy].append(misses)
                self.logger.info(f"SNR {snr:g} dB, power={policy}: {misses}/{config.trials} misses")

        for policy in config.power_allocation:
            name = series_name(power=policy, n_range=config.n_range)
            for snr, misses in zip(config.snr_db, counts[policy]):
                p, half, _ = wilson_interval(misses, config.trials)
                table.add(name, snr, p, config.trials, half)
        return table

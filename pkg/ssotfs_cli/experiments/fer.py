"""Frame error rate of the sensing-assisted downlink versus symbol SNR."""

import math
from dataclasses import dataclass
from functools import partial
from typing import Dict, Mapping, Set

import numpy as np

from ssotfs_cli.experiments.base_experiment import BaseExperiment
from ssotfs_cli.experiments.common import AllocatedPower, allocate_power, count_true, series_name, snr_to_noise
from ssotfs_cli.harness.config import ExperimentConfig
from ssotfs_cli.harness.results import ResultTable, wilson_interval
from ssotfs_cli.phy.channel import Scenario, apply_comm_channel, complex_awgn, sample_scenario
from ssotfs_cli.phy.comm.coding import CODE_75, conv75_encode, viterbi75_decode
from ssotfs_cli.phy.comm.detection import DetectionResult, ml_detect, mmse_detect, mp_detect
from ssotfs_cli.phy.comm.effective import EffectiveDDChannel, build_effective_dd_channel
from ssotfs_cli.phy.constellation import Constellation, get_constellation
from ssotfs_cli.phy.otfs import td_to_dd
from ssotfs_cli.phy.tx import PrecoderSpec, build_precoder_set, estimates_from_radar, full_tx_chain
from ssotfs_cli.utils.parallel import map_trials
from ssotfs_cli.utils.rng import trial_rng

CODE_RATE = 0.5


@dataclass(frozen=True, eq=False)
class FramePayload:
    bits: np.ndarray
    info: np.ndarray
    symbols: np.ndarray


def ebn0_offset_db(constellation: Constellation, coded: bool) -> float:
    """``Eb/N0 - Es/N0`` in dB for the given mapping and coding."""
    rate = CODE_RATE if coded else 1.0
    return -10 * math.log10(constellation.bits_per_symbol * rate)


def info_length(mn: int, constellation: Constellation) -> int:
    """Payload bits per coded frame: half the channel bits minus the flush bits."""
    return (mn * constellation.bits_per_symbol) // 2 - CODE_75.memory


def make_payload(mn: int, constellation: Constellation, coded: bool, rng) -> FramePayload:
    n_bits = mn * constellation.bits_per_symbol
    if coded:
        info = rng.integers(0, 2, info_length(mn, constellation))
        codeword = conv75_encode(info)
        bits = np.zeros(n_bits, dtype=np.int64)
        bits[: codeword.size] = codeword
    else:
        bits = rng.integers(0, 2, n_bits)
        info = bits
    return FramePayload(bits=bits, info=info, symbols=constellation.modulate(bits))


def resolve_detector(detector: str, channel: EffectiveDDChannel) -> str:
    """The detector that ``auto`` stands for on this channel."""
    if detector == "auto":
        return "mp" if channel.integer_only else "mmse"
    return detector


def detect(
    y: np.ndarray,
    channel: EffectiveDDChannel,
    constellation: Constellation,
    n0: float,
    detector: str = "auto",
    iterations: int = 20,
    damping: float = 0.7,
) -> DetectionResult:
    """Runs the configured detector; ``auto`` picks MP for integer-only channels and LMMSE otherwise."""
    detector = resolve_detector(detector, channel)
    if detector == "mp":
        return mp_detect(y, channel, constellation, n0, iterations=iterations, damping=damping)
    if detector == "mmse":
        return mmse_detect(y, channel, constellation, n0)
    symbols = ml_detect(y, channel, constellation)
    indices = constellation.symbol_indices(symbols)
    probabilities = np.eye(constellation.size)[indices]
    return DetectionResult(symbols, indices, probabilities)


def frame_error(
    result: DetectionResult, payload: FramePayload, constellation: Constellation, coded: bool
) -> bool:
    """Any decoded-bit error (coded) or any symbol error (uncoded)."""
    if not coded:
        return bool(np.any(result.indices != constellation.symbol_indices(payload.symbols)))
    llrs = constellation.bit_llrs(result.probabilities)
    n_coded = CODE_75.coded_length(payload.info.size)
    decoded = viterbi75_decode(llrs[:n_coded], payload.info.size)
    return bool(np.any(decoded != payload.info))


def precoders_for(
    scenario: Scenario, policy: str, power: AllocatedPower, rng
) -> Mapping[int, PrecoderSpec]:
    if policy == "none":
        return {}
    return build_precoder_set(
        estimates_from_radar(scenario), policy, scenario.params, rng=rng, beam_sets=power.beam_map()
    )


def _fer_trial(config: ExperimentConfig, point: int, trial: int) -> tuple:
    """One channel, payload and noise draw evaluated under every (precoding, power) series.

    Each series yields ``(frame_error, detector)``.
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
    payload = make_payload(params.mn, constellation, config.coded, rng)
    unit_noise = complex_awgn(params.mn, 1.0, rng)

    errors = []
    for precoding in config.precoding:
        for power_policy in config.power_allocation:
            power = allocate_power(scenario, power_policy, config.n_range)
            precoders = precoders_for(scenario, precoding, power, trial_rng(config.seed, point, trial, 1))
            beta = float(np.mean([power.alpha[scenario.tx_index(0, p)] for p in range(config.P)]))
            n0 = snr_to_noise(beta, config.snr_db[point])

            s = full_tx_chain(payload.symbols, precoders, power.alpha, params)
            r = apply_comm_channel(scenario, 0, s) + math.sqrt(n0) * unit_noise
            channel = build_effective_dd_channel(scenario, 0, precoders, power.alpha)
            detector = resolve_detector(config.detector, channel)
            result = detect(
                td_to_dd(r, params),
                channel,
                constellation,
                n0,
                detector,
                config.mp_iterations,
                config.mp_damping,
            )
            errors.append((frame_error(result, payload, constellation, config.coded), detector))
    return tuple(errors)


def fer_experiment(config: ExperimentConfig, progress: bool = False) -> ResultTable:
    """FER of user 0 versus ``Es/N0 = beta/N0`` per (precoding, power) series.

    ``beta`` is the mean power of the user's path antennas. Metadata records the
    offset to ``Eb/N0``.
    """
    return FerExperiment(config, progress).run()


class FerExperiment(BaseExperiment):
    kind = "fer"

    def run(self) -> ResultTable:
        config = self.config
        constellation = get_constellation(config.constellation)
        table = self.new_table()
        table.metadata["x"] = "es_n0_db"
        table.metadata["metric"] = "frame_error_rate"
        table.metadata["ebn0_offset_db"] = f"{ebn0_offset_db(constellation, config.coded):.10g}"
        table.metadata["coded"] = str(config.coded).lower()
        table.metadata["detector"] = config.detector

        labels = [(pre, pw) for pre in config.precoding for pw in config.power_allocation]
        counts: Dict[tuple, list] = {label: [] for label in labels}
        detectors: Dict[tuple, Set[str]] = {label: set() for label in labels}
        self.logger.info(
            f"FER: M={config.frame.M} N={config.frame.N} P={config.P} {config.constellation} "
            f"coded={config.coded}, {len(labels)} series x {len(config.snr_db)} points "
            f"x {config.trials} frames"
        )
        for point, snr in enumerate(config.snr_db):
            outcomes = map_trials(
                partial(_fer_trial, config, point),
                config.trials,
                workers=config.threads,
                progress=self.progress,
                desc=f"Es/N0 {snr:g} dB",
            )
            for index, label in enumerate(labels):
                flags = [o[index] for o in outcomes]
                errors = count_true([error for error, _ in flags])
                counts[label].append(errors)
                detectors[label].update(detector for _, detector in flags)
                self.logger.info(
                    f"Es/N0 {snr:g} dB, precoding={label[0]}, power={label[1]}: "
                    f"{errors}/{config.trials} frame errors"
                )

        used = table.sidecar.setdefault("detectors", {})
        for precoding, power_policy in labels:
            name = series_name(precoding=precoding, power=power_policy)
            used[name] = "+".join(sorted(detectors[(precoding, power_policy)]))
            for snr, errors in zip(config.snr_db, counts[(precoding, power_policy)]):
                fer, half, _ = wilson_interval(errors, config.trials)
                table.add(name, snr, fer, config.trials, half)
        return table

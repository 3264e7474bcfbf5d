"""Helpers shared by the experiment drivers."""

import math
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from ssotfs_cli.phy.channel import Scenario
from ssotfs_cli.phy.radar import BeamSet, beam_tracking_set, radar_power_allocation
from ssotfs_cli.phy.tx import PowerAllocation, antenna_power, equal_power_allocation
from ssotfs_cli.utils.errors import ConfigurationError

Z_95 = 1.959963984540054


@dataclass(frozen=True, eq=False)
class AllocatedPower:
    """Per-antenna powers plus the per-path values and beam sets they came from."""

    alpha: PowerAllocation
    per_path: np.ndarray
    beams: Tuple[BeamSet, ...]

    def beam_map(self) -> Dict[int, Tuple[int, ...]]:
        return {beam.center: beam.indices for beam in self.beams}


def allocate_power(scenario: Scenario, policy: str, n_range: int = 0) -> AllocatedPower:
    """Distributes ``alpha_total`` over the beam sets of every path.

    ``equal`` gives each beam antenna the same power, ``maxmin-radar``
    equalizes the received echo powers using the reflection coefficients.
    """
    params = scenario.params
    beams = tuple(beam_tracking_set(a, n_range, params.n_bs) for a in scenario.tx_indices())
    n_paths = len(beams)
    if policy == "equal":
        per_path = equal_power_allocation(n_paths, params.alpha_total, n_range)
    elif policy == "maxmin-radar":
        gains = [abs(echo.h_tilde) ** 2 for _, _, _, echo in scenario.iter_paths()]
        per_path = radar_power_allocation(gains, params.alpha_total, n_range)
    else:
        raise ConfigurationError(f"unknown power allocation {policy!r}", field="power_allocation")
    alpha = antenna_power([beam.indices for beam in beams], per_path, params.n_bs, params.alpha_total)
    return AllocatedPower(alpha=alpha, per_path=per_path, beams=beams)


def series_name(**labels) -> str:
    """``key=value`` pairs joined by ``/`` (no commas, so CSV cells stay unquoted)."""
    return "/".join(f"{key}={value}" for key, value in labels.items())


def mean_and_half_width(values: Sequence[float]) -> Tuple[float, float]:
    """Sample mean and the normal-approximation 95% half width."""
    data = np.asarray(values, dtype=float)
    if data.size == 0:
        return math.nan, math.nan
    if data.size == 1:
        return float(data[0]), 0.0
    return float(data.mean()), float(Z_95 * data.std(ddof=1) / math.sqrt(data.size))


def snr_to_noise(signal_power: float, snr_db: float) -> float:
    return signal_power / 10 ** (snr_db / 10)


def count_true(flags: List[bool]) -> int:
    return int(sum(bool(f) for f in flags))

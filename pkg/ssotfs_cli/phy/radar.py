"""Beam tracking, de-spreading, covariance-trace AoA estimation and max-min radar power."""

import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from ssotfs_cli.phy import angular
from ssotfs_cli.phy.channel import stack_columns
from ssotfs_cli.phy.otfs import FrameParams, despread_antennas
from ssotfs_cli.utils.errors import InvalidInputError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BeamSet:
    """Antennas ``a_center - n_range/2 .. a_center + n_range/2`` (modular, 1-based)."""

    center: int
    n_range: int
    indices: Tuple[int, ...]

    def __contains__(self, antenna: int) -> bool:
        return antenna in self.indices

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def disjoint(self, other: "BeamSet") -> bool:
        return not set(self.indices) & set(other.indices)


@dataclass(frozen=True)
class RadarEstimate:
    """Detected receive partitions with their AoAs and echo powers, strongest first.

    ``below_threshold`` is only filled when a detection threshold was given.
    """

    detected_rx_indices: Tuple[int, ...]
    aoas: Tuple[float, ...]
    powers: Tuple[float, ...]
    traces: Tuple[float, ...]
    noise_floor: float
    below_threshold: Optional[Tuple[bool, ...]] = None

    @property
    def detected_set(self) -> frozenset:
        return frozenset(self.detected_rx_indices)

    def matches(self, true_rx_indices: Iterable[int]) -> bool:
        return self.detected_set == frozenset(int(a) for a in true_rx_indices)


def beam_tracking_set(a_center: int, n_range: int, n_bs: int) -> BeamSet:
    """Antenna set of width ``n_range + 1`` centred on ``a_center``."""
    if int(n_range) != n_range or n_range < 0 or n_range % 2:
        raise InvalidInputError(f"beam width must be an even nonnegative integer, got {n_range}")
    if n_range >= n_bs:
        raise InvalidInputError(f"beam width {n_range} must be smaller than n_bs={n_bs}")
    if not 1 <= a_center <= n_bs:
        raise InvalidInputError(f"antenna index {a_center} outside 1..{n_bs}")
    n_range = int(n_range)
    start = a_center - 1 - n_range // 2
    indices = tuple((start + j) % n_bs + 1 for j in range(n_range + 1))
    return BeamSet(center=int(a_center), n_range=n_range, indices=indices)


def despread(r_stacked: np.ndarray, params: FrameParams) -> np.ndarray:
    """``z_tilde = (F kron I_MN) r_tilde`` on the stacked received vector."""
    r_stacked = np.asarray(r_stacked)
    if r_stacked.shape != (params.n_bs * params.mn,):
        raise InvalidInputError(
            f"received vector must have length {params.n_bs * params.mn}, got {r_stacked.shape}"
        )
    R = r_stacked.reshape(params.n_bs, params.mn).T
    return stack_columns(despread_antennas(R))


def covariance_block_traces(frames: Sequence[np.ndarray], n_bs: int) -> np.ndarray:
    """Per-partition trace ``||z_k||^2 / MN`` averaged over the observed frames.

    Args:
        frames: De-spread stacked vectors, one per observed frame, or a 2-D
            array with one frame per row.
        n_bs: Number of antenna partitions.

    Returns:
        Length-``n_bs`` array of trace estimates.
    """
    frames = np.asarray(frames)
    if frames.size == 0:
        raise InvalidInputError("at least one observed frame is required")
    if frames.ndim == 1:
        frames = frames[None, :]
    if frames.shape[1] % n_bs:
        raise InvalidInputError(f"frame length {frames.shape[1]} is not a multiple of n_bs={n_bs}")
    mn = frames.shape[1] // n_bs
    blocks = frames.reshape(frames.shape[0], n_bs, mn)
    return np.mean(np.sum(np.abs(blocks) ** 2, axis=2), axis=0) / mn


def estimate_aoas(
    traces: np.ndarray,
    K: int,
    P: int,
    n_bs: int,
    noise_floor: Optional[float] = None,
    threshold: Optional[float] = None,
) -> RadarEstimate:
    """Picks the ``K*P`` strongest partitions and converts them to AoAs.

    The noise floor defaults to the median trace of the partitions that were
    not selected. Reported powers are traces minus that floor, floored at zero.
    """
    traces = np.asarray(traces, dtype=float)
    if traces.shape != (n_bs,):
        raise InvalidInputError(f"expected {n_bs} traces, got shape {traces.shape}")
    count = K * P
    if count > n_bs:
        raise InvalidInputError(f"cannot select K*P={count} partitions out of {n_bs}")
    order = np.argsort(-traces, kind="stable")
    selected = order[:count]
    rest = order[count:]
    if noise_floor is None:
        noise_floor = float(np.median(traces[rest])) if rest.size else 0.0

    powers = np.maximum(traces[selected] - noise_floor, 0.0)
    rx = tuple(int(a) + 1 for a in selected)
    flags = tuple(bool(p < threshold) for p in powers) if threshold is not None else None
    return RadarEstimate(
        detected_rx_indices=rx,
        aoas=tuple(angular.aoa_from_rx_index(a, n_bs) for a in rx),
        powers=tuple(float(p) for p in powers),
        traces=tuple(float(t) for t in traces[selected]),
        noise_floor=float(noise_floor),
        below_threshold=flags,
    )


def radar_power_allocation(h_tilde_sq: Sequence[float], alpha_total: float, n_range: int = 0) -> np.ndarray:
    """Per-path powers that equalize every received echo power.

    ``alpha_p = alpha_total / (n_range + 1) * (1/|h_p|^2) / sum_j (1/|h_j|^2)``,
    which maximizes the smallest radar SNR.
    """
    if int(n_range) != n_range or n_range < 0 or n_range % 2:
        raise InvalidInputError(f"beam width must be an even nonnegative integer, got {n_range}")
    gains = np.asarray(h_tilde_sq, dtype=float).reshape(-1)
    if gains.size == 0 or np.any(gains <= 0) or not np.all(np.isfinite(gains)):
        raise InvalidInputError("reflection powers must be positive and finite")
    inverse = 1.0 / gains
    return alpha_total / (n_range + 1) * inverse / inverse.sum()

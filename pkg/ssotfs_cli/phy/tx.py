"""Symbol-wise precoders, per-antenna power allocation and the transmit chain."""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np
from scipy.sparse.linalg import LinearOperator

from ssotfs_cli.phy.otfs import (
    FrameParams,
    apply_delay_shift,
    apply_doppler_phase,
    dd_to_td,
    delay_doppler_operator,
    spread_antennas,
)
from ssotfs_cli.phy.channel import Scenario, as_antenna_matrix, stack_columns
from ssotfs_cli.utils.errors import ConfigurationError, InvalidInputError
from ssotfs_cli.utils.rng import as_generator

logger = logging.getLogger(__name__)

VIRTUAL_INDEX_POLICIES = ("distinct", "zero", "random")


@dataclass(frozen=True)
class PrecoderSpec:
    """``W = Delta^{-nu_hat} Pi^{l_dot - l_hat} Delta^{k_dot}`` stored by its exponents.

    Attributes:
        l_hat: Estimated delay index.
        k_hat_total: Estimated Doppler exponent ``k_hat + kappa_hat``.
        l_dot: Virtual delay index.
        k_dot: Virtual Doppler index.
    """

    l_hat: int = 0
    k_hat_total: float = 0.0
    l_dot: int = 0
    k_dot: int = 0

    @classmethod
    def identity(cls) -> "PrecoderSpec":
        return cls()

    @property
    def is_identity(self) -> bool:
        return self.l_hat == self.l_dot and self.k_hat_total == 0 and self.k_dot == 0

    def operator(self, length: int) -> LinearOperator:
        """Matrix-free form of ``W`` on vectors of the given length."""
        return (
            delay_doppler_operator(0, -self.k_hat_total, length)
            @ delay_doppler_operator(self.l_dot - self.l_hat, 0.0, length)
            @ delay_doppler_operator(0, float(self.k_dot), length)
        )


@dataclass(frozen=True)
class PathEstimate:
    """Sensing-derived parameters of one path, as used by the precoder."""

    user: int
    path: int
    a_tx: int
    l_hat: int
    nu_hat: float


@dataclass(frozen=True, eq=False)
class PowerAllocation:
    """Per-antenna transmit powers (length ``n_bs``)."""

    alpha: np.ndarray
    alpha_total: Optional[float] = None

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float).reshape(-1)
        if np.any(alpha < 0):
            raise InvalidInputError("per-antenna powers must be nonnegative")
        if self.alpha_total is not None and alpha.sum() > self.alpha_total + 1e-9:
            raise InvalidInputError(
                f"allocated power {alpha.sum():.6g} exceeds the budget {self.alpha_total:.6g}"
            )
        alpha.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)

    @property
    def n_bs(self) -> int:
        return self.alpha.shape[0]

    def active(self) -> List[int]:
        """1-based indices of antennas with nonzero power."""
        return [int(a) + 1 for a in np.flatnonzero(self.alpha > 0)]

    def __getitem__(self, antenna: int) -> float:
        return float(self.alpha[antenna - 1])


def exact_estimates(scenario: Scenario) -> List[PathEstimate]:
    """Estimates equal to the true communication-path parameters."""
    return [
        PathEstimate(i, p, scenario.tx_index(i, p), path.l, path.nu)
        for i, p, path, _ in scenario.iter_paths()
    ]


def estimates_from_radar(scenario: Scenario) -> List[PathEstimate]:
    """Estimates recovered from the round-trip echoes (halved delay and Doppler)."""
    return [
        PathEstimate(i, p, scenario.tx_index(i, p), echo.l_tilde // 2, echo.nu_tilde / 2)
        for i, p, _, echo in scenario.iter_paths()
    ]


def _virtual_indices(policy: str, P: int, params: FrameParams, rng) -> List[tuple]:
    if policy == "zero":
        return [(0, 0)] * P
    if P > min(params.M, params.N):
        raise ConfigurationError(
            f"{P} paths cannot get distinct virtual indices on a {params.M}x{params.N} grid",
            field="precoding",
        )
    if policy == "distinct":
        return [(p % params.M, p % params.N) for p in range(P)]
    rng = as_generator(rng)
    delays = rng.choice(params.M, P, replace=False)
    dopplers = rng.choice(params.N, P, replace=False)
    return [(int(l), int(k)) for l, k in zip(delays, dopplers)]


def build_precoder_set(
    estimates: Iterable[PathEstimate],
    policy: str,
    params: FrameParams,
    rng=None,
    beam_sets: Optional[Mapping[int, Sequence[int]]] = None,
) -> Dict[int, PrecoderSpec]:
    """Assigns a precoder to every active antenna.

    Virtual indices are assigned per user: under ``distinct`` path ``p`` gets
    ``(p mod M, p mod N)``, under ``random`` distinct indices are drawn from
    ``rng``, under ``zero`` every path gets ``(0, 0)``. Antennas missing from the
    returned map use :meth:`PrecoderSpec.identity`.

    Args:
        estimates: Per-path sensing estimates.
        policy: ``distinct``, ``zero`` or ``random``.
        params: Frame parameters.
        rng: Seed or generator for the ``random`` policy.
        beam_sets: Optional map from a path's transmit index to its beam set;
            the same precoder is then replicated over the whole set.

    Returns:
        Map from 1-based antenna index to PrecoderSpec.
    """
    if policy not in VIRTUAL_INDEX_POLICIES:
        raise ConfigurationError(f"unknown virtual index policy {policy!r}", field="precoding")
    rng = as_generator(rng) if policy == "random" else None

    by_user: Dict[int, List[PathEstimate]] = {}
    for est in estimates:
        by_user.setdefault(est.user, []).append(est)

    precoders: Dict[int, PrecoderSpec] = {}
    for user in sorted(by_user):
        user_estimates = sorted(by_user[user], key=lambda e: e.path)
        virtual = _virtual_indices(policy, len(user_estimates), params, rng)
        for est, (l_dot, k_dot) in zip(user_estimates, virtual):
            spec = PrecoderSpec(l_hat=est.l_hat, k_hat_total=est.nu_hat, l_dot=l_dot, k_dot=k_dot)
            antennas = beam_sets.get(est.a_tx, (est.a_tx,)) if beam_sets else (est.a_tx,)
            for antenna in antennas:
                precoders[int(antenna)] = spec
    return precoders


def apply_precoder(w: PrecoderSpec, v: np.ndarray, axis: int = -1) -> np.ndarray:
    """``W v`` by three shift/phase steps, in the order ``Delta^{k_dot}``, shift, ``Delta^{-nu_hat}``."""
    out = apply_doppler_phase(v, float(w.k_dot), axis=axis)
    out = apply_delay_shift(out, w.l_dot - w.l_hat, axis=axis)
    return apply_doppler_phase(out, -w.k_hat_total, axis=axis)


def equal_power_allocation(n_paths: int, alpha_total: float, n_range: int = 0) -> np.ndarray:
    """Per-path powers that split the budget evenly over every beam antenna."""
    if n_paths < 1:
        raise InvalidInputError("need at least one path")
    return np.full(n_paths, alpha_total / ((n_range + 1) * n_paths))


def antenna_power(
    beam_sets: Sequence[Sequence[int]],
    per_path_alpha: Sequence[float],
    n_bs: int,
    alpha_total: Optional[float] = None,
) -> PowerAllocation:
    """Places each path's per-antenna power on every antenna of its beam set."""
    if len(beam_sets) != len(per_path_alpha):
        raise InvalidInputError("one power value per beam set is required")
    alpha = np.zeros(n_bs)
    for antennas, value in zip(beam_sets, per_path_alpha):
        for antenna in antennas:
            alpha[int(antenna) - 1] += value
    return PowerAllocation(alpha, alpha_total)


def spatial_spread(Z: np.ndarray) -> np.ndarray:
    """``S = Z F^H``: unitary IDFT across the antenna columns of an MN x n_bs matrix."""
    Z = np.asarray(Z)
    if Z.ndim != 2:
        raise InvalidInputError(f"expected an MN x n_bs matrix, got shape {Z.shape}")
    return spread_antennas(Z)


def full_tx_chain(
    x: np.ndarray,
    precoders: Mapping[int, PrecoderSpec],
    alpha: PowerAllocation,
    params: FrameParams,
) -> np.ndarray:
    """Stacked TDS transmit vector for DD frame ``x``.

    DD to TD, per-antenna precoding, ``sqrt(alpha)`` scaling, spatial
    spreading. Antennas without power carry nothing.
    """
    if alpha.n_bs != params.n_bs:
        raise InvalidInputError(f"power vector has {alpha.n_bs} entries, expected {params.n_bs}")
    v = dd_to_td(x, params)
    Z = np.zeros((params.mn, params.n_bs), dtype=np.complex128)
    for antenna in alpha.active():
        spec = precoders.get(antenna, PrecoderSpec.identity())
        Z[:, antenna - 1] = np.sqrt(alpha[antenna]) * apply_precoder(spec, v)
    return stack_columns(spatial_spread(Z))


def transmit_energy(s: np.ndarray, params: FrameParams) -> float:
    return float(np.sum(np.abs(as_antenna_matrix(s, params)) ** 2))

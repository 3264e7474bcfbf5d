"""Effective DD-domain channel seen by a user after precoding."""

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse

from ssotfs_cli.phy.channel import Path, Scenario
from ssotfs_cli.phy.otfs import FrameParams, dd_to_td, delay_doppler_operator, tap_structure, td_to_dd
from ssotfs_cli.phy.tx import PowerAllocation, PrecoderSpec, apply_precoder
from ssotfs_cli.utils.errors import UnsupportedInputError

_INTEGER_TOL = 1e-12


@dataclass(frozen=True)
class TapShift:
    """``phase * Pi^delay * Delta^doppler``, the collapsed form of a path and its precoder."""

    delay: int
    doppler: float
    phase: complex = 1.0

    @property
    def integer(self) -> bool:
        return abs(self.doppler - round(self.doppler)) < _INTEGER_TOL


@dataclass(frozen=True)
class DDTap:
    delay: int
    doppler: float
    weight: complex


def effective_shift(path: Path, precoder: Optional[PrecoderSpec], params: FrameParams) -> Optional[TapShift]:
    """Collapses ``Pi^l Delta^nu W`` into a single shift/phase when possible.

    With ``W = Delta^{-nu_hat} Pi^{d} Delta^{k_dot}`` and ``m = nu - nu_hat``
    an integer, ``Delta^m Pi^d = gamma^{m d} Pi^d Delta^m`` gives
    ``gamma^{m d} Pi^{l + d} Delta^{m + k_dot}``. A fractional residual ``m``
    does not collapse and ``None`` is returned.
    """
    if precoder is None or precoder == PrecoderSpec.identity():
        return TapShift(path.l, path.nu)
    residual = path.nu - precoder.k_hat_total
    if abs(residual - round(residual)) > _INTEGER_TOL:
        return None
    m = int(round(residual))
    d = precoder.l_dot - precoder.l_hat
    phase = np.exp(2j * np.pi * m * d / params.mn)
    return TapShift((path.l + d) % params.mn, float(m + precoder.k_dot), complex(phase))


def xi_apply(x: np.ndarray, path: Path, precoder: Optional[PrecoderSpec], params: FrameParams) -> np.ndarray:
    """``(F_N kron I_M) Pi^l Delta^{k+kappa} W (F_N^H kron I_M) x`` without the path gain."""
    v = dd_to_td(x, params)
    if precoder is not None:
        v = apply_precoder(precoder, v)
    v = delay_doppler_operator(path.l, path.nu, params.mn) @ v
    return td_to_dd(v, params)


@dataclass(frozen=True, eq=False)
class EffectiveDDChannel:
    """``H^DD = sum_p w_p Xi_p`` with ``w_p = sqrt(alpha_{a_p}) h_p``.

    ``taps`` is available when every path collapses to a single shift;
    ``integer_only`` additionally requires integer Doppler on every tap.
    """

    params: FrameParams
    paths: Tuple[Path, ...]
    precoders: Tuple[Optional[PrecoderSpec], ...]
    weights: Tuple[complex, ...]

    @property
    def P(self) -> int:
        return len(self.paths)

    @property
    def taps(self) -> Optional[Tuple[DDTap, ...]]:
        taps = []
        for path, precoder, weight in zip(self.paths, self.precoders, self.weights):
            shift = effective_shift(path, precoder, self.params)
            if shift is None:
                return None
            taps.append(DDTap(shift.delay, shift.doppler, complex(weight * shift.phase)))
        return tuple(taps)

    @property
    def integer_only(self) -> bool:
        taps = self.taps
        return taps is not None and all(abs(t.doppler - round(t.doppler)) < _INTEGER_TOL for t in taps)

    def apply(self, x: np.ndarray) -> np.ndarray:
        y = np.zeros(self.params.mn, dtype=np.complex128)
        for path, precoder, weight in zip(self.paths, self.precoders, self.weights):
            if weight != 0:
                y += weight * xi_apply(x, path, precoder, self.params)
        return y

    def dense(self) -> np.ndarray:
        """MN x MN matrix, built column by column from the structured operators."""
        mn = self.params.mn
        H = np.empty((mn, mn), dtype=np.complex128)
        basis = np.zeros(mn, dtype=np.complex128)
        for c in range(mn):
            basis[c] = 1.0
            H[:, c] = self.apply(basis)
            basis[c] = 0.0
        return H

    def sparse(self) -> scipy.sparse.csr_matrix:
        """Sparse DD matrix of an integer-only channel; coinciding taps are merged."""
        if not self.integer_only:
            raise UnsupportedInputError(
                "sparse DD form needs integer delay and Doppler taps; use a dense detector"
            )
        rows, cols, vals = [], [], []
        for tap in self.taps:
            if tap.weight == 0:
                continue
            r, c, coef = tap_structure(tap.delay, int(round(tap.doppler)), self.params)
            rows.append(r)
            cols.append(c)
            vals.append(tap.weight * coef)
        mn = self.params.mn
        if not rows:
            return scipy.sparse.csr_matrix((mn, mn), dtype=np.complex128)
        matrix = scipy.sparse.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(mn, mn)
        ).tocsr()
        matrix.sum_duplicates()
        matrix.eliminate_zeros()
        return matrix


def effective_channel_from_paths(
    paths: Sequence[Path],
    precoders: Sequence[Optional[PrecoderSpec]],
    weights: Sequence[complex],
    params: FrameParams,
) -> EffectiveDDChannel:
    return EffectiveDDChannel(params, tuple(paths), tuple(precoders), tuple(complex(w) for w in weights))


def build_effective_dd_channel(
    scenario: Scenario,
    i: int,
    precoders: Mapping[int, PrecoderSpec],
    alpha: PowerAllocation,
) -> EffectiveDDChannel:
    """Effective channel of user ``i`` under on-grid angular separation.

    Each path only couples to its own transmit antenna, whose precoder and
    power set the tap.
    """
    paths = scenario.user_paths(i)
    antennas = [scenario.tx_index(i, p) for p in range(len(paths))]
    specs = tuple(precoders.get(a, PrecoderSpec.identity()) for a in antennas)
    weights = tuple(math.sqrt(alpha[a]) * path.h for a, path in zip(antennas, paths))
    return EffectiveDDChannel(scenario.params, tuple(paths), specs, weights)

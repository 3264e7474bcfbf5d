"""Steering vectors, angular indices and the angular-domain channel forms.

Antenna and angular indices are 1-based (``1..n_bs``) throughout this package;
array positions are ``index - 1``.
"""

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from ssotfs_cli.utils.errors import InvalidInputError

ON_GRID_TOL = 1e-9
_SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class AngularIndexPair:
    a_tx: int
    a_rx: int


@dataclass(frozen=True)
class AngularIndices:
    """Raw (unrounded) index values, their rounded pair and the on-grid flag."""

    raw_tx: float
    raw_rx: float
    pair: AngularIndexPair
    on_grid: bool

    @property
    def a_tx(self) -> int:
        return self.pair.a_tx

    @property
    def a_rx(self) -> int:
        return self.pair.a_rx


def _check_angle(phi: float) -> float:
    phi = float(phi)
    if not -math.pi / 2 - 1e-12 <= phi <= math.pi / 2 + 1e-12:
        raise InvalidInputError(f"angle {phi} rad outside [-pi/2, pi/2]")
    return phi


def _check_n_bs(n_bs: int) -> int:
    if int(n_bs) != n_bs or n_bs < 1:
        raise InvalidInputError(f"n_bs must be a positive integer, got {n_bs}")
    return int(n_bs)


def _power_vector(alpha, n_bs: int) -> np.ndarray:
    values = getattr(alpha, "alpha", alpha)
    values = np.broadcast_to(np.asarray(values, dtype=float), (n_bs,))
    if np.any(values < 0):
        raise InvalidInputError("per-antenna powers must be nonnegative")
    return values


def steering_vector(phi: float, n_bs: int) -> np.ndarray:
    """Unit-norm ULA steering vector with half-wavelength spacing."""
    phi = _check_angle(phi)
    n_bs = _check_n_bs(n_bs)
    m = np.arange(n_bs)
    return np.exp(1j * np.pi * m * math.sin(phi)) / math.sqrt(n_bs)


def _round_index(raw: float, n_bs: int) -> int:
    # nearest integer, ties toward the smaller index, wrapped into 1..n_bs
    rounded = math.ceil(raw - 0.5)
    return (rounded - 1) % n_bs + 1


def is_on_grid(phi: float, n_bs: int) -> bool:
    half = math.sin(_check_angle(phi)) * n_bs / 2
    return abs(half - round(half)) < ON_GRID_TOL


def angular_indices(phi: float, n_bs: int) -> AngularIndices:
    """Transmit and receive angular indices of an angle.

    The modular reduction is applied to the raw value first, then it is
    rounded to the nearest antenna index.
    """
    phi = _check_angle(phi)
    n_bs = _check_n_bs(n_bs)
    half = math.sin(phi) * n_bs / 2
    raw_tx = (n_bs - half) % n_bs + 1
    raw_rx = (n_bs + half) % n_bs + 1
    pair = AngularIndexPair(_round_index(raw_tx, n_bs), _round_index(raw_rx, n_bs))
    return AngularIndices(raw_tx, raw_rx, pair, is_on_grid(phi, n_bs))


def rx_to_tx_index(a_rx: int, n_bs: int) -> int:
    """Transmit index of the same on-grid angle (``a_tx - 1 = -(a_rx - 1) mod n_bs``)."""
    return (-(int(a_rx) - 1)) % n_bs + 1


def aoa_from_rx_index(a_rx: int, n_bs: int) -> float:
    """Principal AoA in [-pi/2, pi/2] whose receive index is ``a_rx``."""
    if not 1 <= a_rx <= n_bs:
        raise InvalidInputError(f"receive index {a_rx} outside 1..{n_bs}")
    s = 2.0 * (a_rx - 1) / n_bs
    if s >= 1.0 + 1e-12:
        s -= 2.0
    return math.asin(min(1.0, max(-1.0, s)))


def aoa_from_tx_index(a_tx: int, n_bs: int) -> float:
    """On-grid angle with ``sin(phi) = -2 (a_tx - 1) / n_bs`` wrapped into [-1, 1]."""
    if not 1 <= a_tx <= n_bs:
        raise InvalidInputError(f"transmit index {a_tx} outside 1..{n_bs}")
    s = -2.0 * (a_tx - 1) / n_bs
    if s < -1.0 - 1e-12:
        s += 2.0
    return math.asin(min(1.0, max(-1.0, s)))


def _dirichlet_row(phi: float, n_bs: int, sign: int) -> np.ndarray:
    """``(1/n)(1 - e^{j pi n s}) / (1 - e^{j pi s + sign j 2 pi (l-1)/n})`` for l = 1..n.

    ``sign = +1`` gives ``a^T F^H`` and ``sign = -1`` gives ``F a`` for the
    unit-norm steering vector ``a`` and the unitary DFT ``F``.
    """
    s = math.sin(phi)
    idx = np.arange(n_bs)
    numerator = 1.0 - np.exp(1j * np.pi * n_bs * s)
    denominator = 1.0 - np.exp(1j * np.pi * s + sign * 2j * np.pi * idx / n_bs)
    out = np.empty(n_bs, dtype=np.complex128)
    singular = np.abs(denominator) < _SINGULAR_TOL
    out[~singular] = numerator / (n_bs * denominator[~singular])
    out[singular] = 1.0
    if is_on_grid(phi, n_bs):
        indices = angular_indices(phi, n_bs)
        peak = (indices.a_tx if sign > 0 else indices.a_rx) - 1
        out[:] = 0.0
        out[peak] = 1.0
    return out


def angular_rx_vector(phi: float, n_bs: int) -> np.ndarray:
    """Receive-side angular factor ``F a(phi)`` scaled so the on-grid peak is 1."""
    phi = _check_angle(phi)
    return _dirichlet_row(phi, _check_n_bs(n_bs), sign=-1)


def angular_comm_vector(phi: float, n_bs: int, alpha) -> np.ndarray:
    """Equivalent angular-domain communication vector ``h^A = a^T F^H diag(sqrt(alpha))``.

    Evaluated in closed form. At on-grid angles the removable singularity at
    ``a_tx`` is replaced by its limit.
    """
    phi = _check_angle(phi)
    n_bs = _check_n_bs(n_bs)
    weights = np.sqrt(_power_vector(alpha, n_bs))
    return _dirichlet_row(phi, n_bs, sign=1) * weights


def angular_radar_matrix(phi: float, n_bs: int, alpha) -> np.ndarray:
    """Equivalent angular-domain radar matrix ``F a a^T F^H diag(sqrt(alpha))``.

    The matrix is the rank-one outer product of the receive factor and the
    communication vector; rows are receive indices, columns transmit indices.
    """
    return np.outer(angular_rx_vector(phi, n_bs), angular_comm_vector(phi, n_bs, alpha))


def lemma1_orthogonal(phis: Iterable[float], n_bs: int, tol: float = 1e-10) -> bool:
    """True when the angular vectors of ``phis`` are mutually orthogonal.

    This is the path-separability assumption: on-grid angles with distinct
    transmit indices occupy disjoint antennas after spreading.
    """
    vectors = np.array([angular_comm_vector(phi, n_bs, 1.0) for phi in phis])
    if len(vectors) < 2:
        return True
    gram = vectors.conj() @ vectors.T
    off = gram - np.diag(np.diag(gram))
    return bool(np.max(np.abs(off)) < tol)


def sin_grid(indices: Union[int, Sequence[int]], n_bs: int) -> np.ndarray:
    """``sin(phi)`` values of on-grid transmit indices."""
    a = np.atleast_1d(np.asarray(indices, dtype=float))
    s = -2.0 * (a - 1) / n_bs
    return np.where(s < -1.0, s + 2.0, s)

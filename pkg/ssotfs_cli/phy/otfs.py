"""OTFS frame parameters, DD/TD transforms and the shift/phase channel operators.

Vectors follow the column-major vectorization of the M x N delay-Doppler
matrix: delay is the fast axis, so entry ``m + n*M`` holds delay bin ``m`` and
Doppler bin ``n``. All DFTs are unitary.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.fft
from scipy.sparse.linalg import LinearOperator

from ssotfs_cli.utils.errors import InvalidInputError


@dataclass(frozen=True)
class FrameParams:
    """OTFS grid and array geometry.

    Attributes:
        M: Number of delay bins.
        N: Number of Doppler bins.
        n_bs: Number of BS antennas.
        delta_f: Subcarrier spacing in Hz.
        T: Slot duration in seconds; defaults to ``1 / delta_f``.
        alpha_total: Total transmit power budget.
    """

    M: int = 32
    N: int = 16
    n_bs: int = 128
    delta_f: float = 15e3
    T: Optional[float] = field(default=None)
    alpha_total: float = 1.0

    def __post_init__(self):
        for name in ("M", "N", "n_bs"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise InvalidInputError(f"{name} must be a positive integer, got {value}")
            object.__setattr__(self, name, int(value))
        if self.delta_f <= 0:
            raise InvalidInputError(f"delta_f must be positive, got {self.delta_f}")
        if self.T is None:
            object.__setattr__(self, "T", 1.0 / self.delta_f)
        if self.T <= 0:
            raise InvalidInputError(f"T must be positive, got {self.T}")
        if self.alpha_total <= 0:
            raise InvalidInputError(f"alpha_total must be positive, got {self.alpha_total}")

    @property
    def mn(self) -> int:
        return self.M * self.N

    @property
    def delay_resolution(self) -> float:
        return 1.0 / (self.M * self.delta_f)

    @property
    def doppler_resolution(self) -> float:
        return 1.0 / (self.N * self.T)


def check_length(v: np.ndarray, length: int, name: str = "vector") -> np.ndarray:
    v = np.asarray(v)
    if v.ndim != 1 or v.shape[0] != length:
        raise InvalidInputError(f"{name} must have length {length}, got shape {v.shape}")
    return v


def dd_to_td(x: np.ndarray, params: FrameParams) -> np.ndarray:
    """Maps a DD frame to the TD domain, ``v = (F_N^H kron I_M) x``."""
    x = check_length(x, params.mn, "DD frame")
    X = x.reshape(params.M, params.N, order="F")
    return scipy.fft.ifft(X, axis=1, norm="ortho").reshape(-1, order="F")


def td_to_dd(v: np.ndarray, params: FrameParams) -> np.ndarray:
    """Maps a TD frame back to the DD domain, ``x = (F_N kron I_M) v``."""
    v = check_length(v, params.mn, "TD frame")
    V = v.reshape(params.M, params.N, order="F")
    return scipy.fft.fft(V, axis=1, norm="ortho").reshape(-1, order="F")


def apply_delay_shift(v: np.ndarray, l: int, axis: int = -1) -> np.ndarray:
    """Forward cyclic shift by ``l`` positions (``Pi^l v``)."""
    v = np.asarray(v)
    if v.size == 0 or v.shape[axis] == 0:
        raise InvalidInputError("cannot shift an empty vector")
    return np.roll(v, int(l) % v.shape[axis], axis=axis)


def doppler_ramp(length: int, kappa_total: float) -> np.ndarray:
    """Diagonal of ``Delta^{kappa_total}`` for a length-``length`` vector."""
    n = np.arange(length)
    return np.exp(2j * np.pi * kappa_total * n / length)


def apply_doppler_phase(v: np.ndarray, kappa_total: float, axis: int = -1) -> np.ndarray:
    """Multiplies entry ``n`` by ``exp(j 2 pi kappa_total n / L)`` (``Delta^{kappa_total} v``)."""
    v = np.asarray(v)
    if v.size == 0 or v.shape[axis] == 0:
        raise InvalidInputError("cannot apply a Doppler ramp to an empty vector")
    ramp = doppler_ramp(v.shape[axis], kappa_total)
    shape = [1] * v.ndim
    shape[axis] = -1
    return v * ramp.reshape(shape)


class ShiftPhaseOperator(LinearOperator):
    """``gain * Pi^delay * Delta^doppler`` as a matrix-free operator.

    The Doppler ramp is applied first, then the cyclic shift, then the gain.
    """

    def __init__(self, length: int, delay: int = 0, doppler: float = 0.0, gain: complex = 1.0):
        super().__init__(dtype=np.complex128, shape=(length, length))
        self.delay = int(delay)
        self.doppler = float(doppler)
        self.gain = complex(gain)

    def _matvec(self, v):
        v = np.asarray(v).reshape(-1)
        return self.gain * apply_delay_shift(apply_doppler_phase(v, self.doppler), self.delay)

    def _matmat(self, V):
        V = np.asarray(V)
        out = apply_delay_shift(apply_doppler_phase(V, self.doppler, axis=0), self.delay, axis=0)
        return self.gain * out

    def _rmatvec(self, v):
        v = np.asarray(v).reshape(-1)
        back = apply_doppler_phase(apply_delay_shift(v, -self.delay), -self.doppler)
        return np.conj(self.gain) * back

    def _adjoint(self):
        return _AdjointShiftPhase(self)

    def __repr__(self):
        return (
            f"ShiftPhaseOperator(length={self.shape[0]}, delay={self.delay}, "
            f"doppler={self.doppler}, gain={self.gain})"
        )


class _AdjointShiftPhase(LinearOperator):
    def __init__(self, op: ShiftPhaseOperator):
        super().__init__(dtype=np.complex128, shape=op.shape)
        self.op = op

    def _matvec(self, v):
        return self.op._rmatvec(v)

    def _matmat(self, V):
        V = np.asarray(V)
        back = apply_doppler_phase(apply_delay_shift(V, -self.op.delay, axis=0), -self.op.doppler, axis=0)
        return np.conj(self.op.gain) * back

    def _rmatvec(self, v):
        return self.op._matvec(v)

    def _adjoint(self):
        return self.op


def delay_doppler_operator(
    l: int, nu: float, length: int, gain: complex = 1.0
) -> ShiftPhaseOperator:
    """Builds ``gain * Pi^l * Delta^nu`` on vectors of the given length."""
    if length < 1:
        raise InvalidInputError("operator length must be positive")
    return ShiftPhaseOperator(length, delay=l, doppler=nu, gain=gain)


def dd_tap_response(x: np.ndarray, l: int, k: int, params: FrameParams) -> np.ndarray:
    """DD-domain action of an integer tap, ``(F_N kron I_M) Pi^l Delta^k (F_N^H kron I_M) x``.

    Under the reduced-CP model the result has one nonzero per row:
    ``y[m, n] = x[[m-l]_M, [n-k]_N] * exp(j2pi k [m-l]_M / MN) * exp(-j2pi c n / N)``
    where ``c`` counts the slots the shift carried the sample across.
    """
    x = check_length(x, params.mn, "DD frame")
    rows, cols, coefs = tap_structure(l, k, params)
    y = np.zeros(params.mn, dtype=np.complex128)
    y[rows] = coefs * x[cols]
    return y


def tap_structure(l: int, k: int, params: FrameParams):
    """Row index, column index and coefficient arrays of an integer DD tap."""
    M, N = params.M, params.N
    if int(l) != l or int(k) != k:
        raise InvalidInputError("tap structure needs integer delay and Doppler indices")
    l, k = int(l) % (M * N), int(k)
    m = np.repeat(np.arange(M)[:, None], N, axis=1)
    n = np.repeat(np.arange(N)[None, :], M, axis=0)
    # slots carried by the cyclic shift: whole slots plus one when the delay wraps
    carry = l // M + (m < l % M)
    src_m = (m - l) % M
    src_n = (n - k) % N
    phase = np.exp(2j * np.pi * k * src_m / (M * N)) * np.exp(-2j * np.pi * carry * n / N)
    rows = (m + n * M).reshape(-1, order="F")
    cols = (src_m + src_n * M).reshape(-1, order="F")
    return rows, cols, phase.reshape(-1, order="F")


def spread_antennas(Z: np.ndarray) -> np.ndarray:
    """Unitary inverse DFT across the antenna axis of an MN x n_bs matrix (``Z F^H``)."""
    return scipy.fft.ifft(np.asarray(Z), axis=1, norm="ortho")


def despread_antennas(S: np.ndarray) -> np.ndarray:
    """Unitary DFT across the antenna axis (``S F``), the inverse of :func:`spread_antennas`."""
    return scipy.fft.fft(np.asarray(S), axis=1, norm="ortho")

"""DD-domain symbol detectors: exhaustive ML, Gaussian message passing and LMMSE."""

import logging
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
import scipy.linalg
from scipy.special import softmax

from ssotfs_cli.phy.comm.effective import EffectiveDDChannel
from ssotfs_cli.phy.constellation import Constellation
from ssotfs_cli.utils.errors import ConfigurationError, InvalidInputError, UnsupportedInputError

logger = logging.getLogger(__name__)

ML_BIT_BUDGET = 20
_ML_CHUNK = 1 << 14
_VARIANCE_FLOOR = 1e-10


@dataclass(frozen=True, eq=False)
class DetectionResult:
    """Hard decisions and per-symbol posterior probabilities (rows sum to 1)."""

    symbols: np.ndarray
    indices: np.ndarray
    probabilities: np.ndarray
    iterations: int = 1


def _dense(H: Union[np.ndarray, EffectiveDDChannel]) -> np.ndarray:
    if isinstance(H, EffectiveDDChannel):
        return H.dense()
    H = np.asarray(H)
    if H.ndim != 2:
        raise InvalidInputError(f"channel matrix must be 2-D, got shape {H.shape}")
    return H


def ml_detect(y: np.ndarray, H, constellation: Constellation) -> np.ndarray:
    """Exhaustive ML search over all codewords.

    Codewords are enumerated in lexicographic order of constellation indices
    (first symbol most significant); the first minimizer wins ties.

    Raises:
        ConfigurationError: when ``MN * log2|A|`` exceeds the search budget.
    """
    H = _dense(H)
    y = np.asarray(y).reshape(-1)
    n_symbols = H.shape[1]
    if y.shape[0] != H.shape[0]:
        raise InvalidInputError(f"observation length {y.shape[0]} does not match H {H.shape}")
    q = constellation.size
    bits = n_symbols * math.log2(q)
    if bits > ML_BIT_BUDGET:
        raise ConfigurationError(
            f"exhaustive ML over {bits:.0f} bits exceeds the budget of {ML_BIT_BUDGET}",
            field="detector",
        )

    total = q**n_symbols
    place = q ** np.arange(n_symbols - 1, -1, -1, dtype=np.int64)
    best_metric, best_index = np.inf, 0
    for start in range(0, total, _ML_CHUNK):
        idx = np.arange(start, min(start + _ML_CHUNK, total), dtype=np.int64)
        digits = (idx[:, None] // place[None, :]) % q
        candidates = constellation.points[digits]
        metrics = np.sum(np.abs(y[None, :] - candidates @ H.T) ** 2, axis=1)
        local = int(np.argmin(metrics))
        if metrics[local] < best_metric:
            best_metric, best_index = metrics[local], int(idx[local])
    digits = (best_index // place) % q
    return constellation.points[digits]


def mp_detect(
    y: np.ndarray,
    channel: EffectiveDDChannel,
    constellation: Constellation,
    n0: float,
    iterations: int = 20,
    damping: float = 0.7,
    tol: float = 1e-6,
) -> DetectionResult:
    """Gaussian-approximation message passing over the sparse DD factor graph.

    Each observation node models the interference from all but one connected
    symbol as Gaussian; symbol nodes combine the extrinsic likelihoods. New
    symbol-to-observation messages are mixed with the previous ones by
    ``damping`` (1 means no damping).

    Args:
        y: Received DD vector.
        channel: Integer-only effective channel.
        constellation: Symbol alphabet.
        n0: Noise power per complex sample.
        iterations: Maximum number of iterations.
        damping: Message damping factor in (0, 1].
        tol: Stop when no message changes by more than this.

    Returns:
        DetectionResult
    """
    if not channel.integer_only:
        raise UnsupportedInputError(
            "message passing needs an integer-only channel; use ml_detect or mmse_detect"
        )
    if not 0 < damping <= 1:
        raise InvalidInputError(f"damping must be in (0, 1], got {damping}")
    H = channel.sparse().tocoo()
    rows, cols, vals = H.row, H.col, H.data
    y = np.asarray(y).reshape(-1)
    mn = channel.params.mn
    points = constellation.points
    energy = np.abs(points) ** 2
    q = constellation.size

    messages = np.full((rows.size, q), 1.0 / q)
    col_ll = np.zeros((mn, q))
    y_edge = y[rows]
    gain_sq = np.abs(vals) ** 2
    done = 0
    for done in range(1, iterations + 1):
        mean = messages @ points
        var = np.maximum(messages @ energy - np.abs(mean) ** 2, 0.0)
        contrib = vals * mean
        row_mean = np.bincount(rows, contrib.real, mn) + 1j * np.bincount(rows, contrib.imag, mn)
        row_var = np.bincount(rows, gain_sq * var, mn)

        mu = row_mean[rows] - contrib
        sigma2 = np.maximum(row_var[rows] - gain_sq * var + n0, _VARIANCE_FLOOR)
        residual = (y_edge - mu)[:, None] - vals[:, None] * points[None, :]
        ll = -np.abs(residual) ** 2 / sigma2[:, None]

        col_ll = np.zeros((mn, q))
        np.add.at(col_ll, cols, ll)
        updated = softmax(col_ll[cols] - ll, axis=1)
        updated = damping * updated + (1.0 - damping) * messages
        change = np.max(np.abs(updated - messages)) if messages.size else 0.0
        messages = updated
        if change < tol:
            break

    probabilities = softmax(col_ll, axis=1)
    indices = np.argmax(probabilities, axis=1)
    logger.debug(f"Message passing stopped after {done} iterations")
    return DetectionResult(points[indices], indices, probabilities, done)


def mmse_detect(y: np.ndarray, H, constellation: Constellation, n0: float) -> DetectionResult:
    """LMMSE equalization with per-symbol Gaussian posteriors.

    The unbiased estimate of symbol ``k`` is modelled as ``x_k`` plus Gaussian
    noise of variance ``(1 - g_k) / g_k`` where ``g_k`` is the MMSE gain.
    """
    H = _dense(H)
    y = np.asarray(y).reshape(-1)
    n = H.shape[1]
    reg = max(float(n0), _VARIANCE_FLOOR)
    gram = H.conj().T @ H + reg * np.eye(n)
    W = scipy.linalg.solve(gram, H.conj().T, assume_a="pos")
    estimate = W @ y
    gain = np.real(np.einsum("ij,ji->i", W, H))
    gain = np.clip(gain, _VARIANCE_FLOOR, 1.0)
    unbiased = estimate / gain
    noise = np.maximum((1.0 - gain) / gain, _VARIANCE_FLOOR)
    ll = -np.abs(unbiased[:, None] - constellation.points[None, :]) ** 2 / noise[:, None]
    probabilities = softmax(ll, axis=1)
    indices = np.argmax(probabilities, axis=1)
    return DetectionResult(constellation.points[indices], indices, probabilities)

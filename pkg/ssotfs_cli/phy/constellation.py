"""Unit-energy BPSK/QPSK constellations with Gray labelling."""

from dataclasses import dataclass

import numpy as np

from ssotfs_cli.utils.errors import ConfigurationError, InvalidInputError

LLR_CLIP = 30.0


@dataclass(frozen=True, eq=False)
class Constellation:
    """Symbol alphabet and its bit labels (row ``q`` labels ``points[q]``)."""

    name: str
    points: np.ndarray
    labels: np.ndarray

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def bits_per_symbol(self) -> int:
        return self.labels.shape[1]

    def modulate(self, bits: np.ndarray) -> np.ndarray:
        bits = np.asarray(bits, dtype=np.int64).reshape(-1)
        if bits.size % self.bits_per_symbol:
            raise InvalidInputError(
                f"{bits.size} bits do not fill whole {self.name} symbols"
            )
        groups = bits.reshape(-1, self.bits_per_symbol)
        weights = 1 << np.arange(self.bits_per_symbol - 1, -1, -1)
        return self.points[groups @ weights]

    def symbol_indices(self, symbols: np.ndarray) -> np.ndarray:
        """Nearest constellation index of every symbol."""
        symbols = np.asarray(symbols).reshape(-1, 1)
        return np.argmin(np.abs(symbols - self.points[None, :]), axis=1)

    def hard_decision(self, symbols: np.ndarray) -> np.ndarray:
        return self.points[self.symbol_indices(symbols)]

    def demodulate(self, indices: np.ndarray) -> np.ndarray:
        """Bits of the given symbol indices."""
        return self.labels[np.asarray(indices, dtype=np.int64)].reshape(-1)

    def bit_llrs(self, probabilities: np.ndarray) -> np.ndarray:
        """Bit LLRs ``log P(b=0) / P(b=1)`` from per-symbol probabilities, clipped to +-30."""
        probabilities = np.asarray(probabilities, dtype=float)
        if probabilities.ndim != 2 or probabilities.shape[1] != self.size:
            raise InvalidInputError(f"expected an (n, {self.size}) probability array")
        tiny = np.finfo(float).tiny
        llrs = np.empty((probabilities.shape[0], self.bits_per_symbol))
        for b in range(self.bits_per_symbol):
            zero = probabilities[:, self.labels[:, b] == 0].sum(axis=1)
            one = probabilities[:, self.labels[:, b] == 1].sum(axis=1)
            llrs[:, b] = np.log(np.maximum(zero, tiny)) - np.log(np.maximum(one, tiny))
        return np.clip(llrs.reshape(-1), -LLR_CLIP, LLR_CLIP)

    def random_symbols(self, count: int, rng) -> np.ndarray:
        return self.points[rng.integers(0, self.size, count)]


BPSK = Constellation(
    name="bpsk",
    points=np.array([1.0 + 0j, -1.0 + 0j]),
    labels=np.array([[0], [1]]),
)

QPSK = Constellation(
    name="qpsk",
    points=np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) / np.sqrt(2.0),
    labels=np.array([[0, 0], [0, 1], [1, 0], [1, 1]]),
)

_CONSTELLATIONS = {"bpsk": BPSK, "qpsk": QPSK}


def get_constellation(name: str) -> Constellation:
    try:
        return _CONSTELLATIONS[name.lower()]
    except KeyError:
        raise ConfigurationError(f"unsupported constellation {name!r}", field="constellation") from None

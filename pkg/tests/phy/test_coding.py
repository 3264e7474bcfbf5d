"""Tests for the terminated (7,5) convolutional code and its Viterbi decoder."""

import numpy as np
import pytest

from ssotfs_cli.phy.comm.coding import CODE_75, ConvolutionalCode, conv75_encode, viterbi75_decode
from ssotfs_cli.utils.errors import InvalidInputError


def _llrs(codeword, magnitude=4.0):
    return magnitude * (1 - 2 * np.asarray(codeword, dtype=float))


class TestEncoder:
    def test_all_zero(self):
        assert np.array_equal(conv75_encode(np.zeros(10, dtype=int)), np.zeros(24))

    def test_impulse_response(self):
        """Outputs (g7, g5) interleaved: 11 10 11."""
        assert np.array_equal(conv75_encode([1]), [1, 1, 1, 0, 1, 1])

    def test_length(self):
        assert conv75_encode(np.ones(7, dtype=int)).size == CODE_75.coded_length(7) == 18

    def test_linearity(self, rng):
        a = rng.integers(0, 2, 20)
        b = rng.integers(0, 2, 20)
        assert np.array_equal(conv75_encode(a ^ b), conv75_encode(a) ^ conv75_encode(b))

    def test_non_binary_rejected(self):
        with pytest.raises(InvalidInputError):
            conv75_encode([0, 2, 1])


class TestDecoder:
    def test_noiseless_round_trip(self, rng):
        for _ in range(5):
            bits = rng.integers(0, 2, 64)
            assert np.array_equal(viterbi75_decode(_llrs(conv75_encode(bits)), 64), bits)

    def test_corrects_two_errors(self, rng):
        bits = rng.integers(0, 2, 64)
        llrs = _llrs(conv75_encode(bits))
        llrs[[10, 60]] *= -1
        assert np.array_equal(viterbi75_decode(llrs), bits)

    def test_soft_values_break_ties(self, rng):
        """A weak wrong bit is outvoted by strong correct neighbours."""
        bits = rng.integers(0, 2, 32)
        llrs = _llrs(conv75_encode(bits))
        llrs[:12] *= -0.1
        llrs[12:] *= 3
        decoded = viterbi75_decode(llrs)
        assert np.mean(decoded[8:] != bits[8:]) == 0

    def test_length_checks(self):
        with pytest.raises(InvalidInputError):
            viterbi75_decode(np.ones(7))
        with pytest.raises(InvalidInputError):
            viterbi75_decode(np.ones(2))
        with pytest.raises(InvalidInputError):
            viterbi75_decode(np.ones(20), n_info=5)

    def test_other_generators(self, rng):
        code = ConvolutionalCode(4, (0o15, 0o17))
        bits = rng.integers(0, 2, 30)
        codeword = code.encode(bits)
        assert codeword.size == code.coded_length(30)
        assert np.array_equal(code.decode(_llrs(codeword)), bits)

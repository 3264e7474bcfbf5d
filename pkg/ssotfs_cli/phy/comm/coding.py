"""Terminated rate-1/2 convolutional code and its soft-input Viterbi decoder."""

from typing import Optional, Sequence

import numpy as np

from ssotfs_cli.utils.errors import InvalidInputError


class ConvolutionalCode:
    """Feed-forward rate 1/n convolutional code with zero-tail termination.

    Args:
        constraint_length: Register length including the current input (K).
        polynomials: Generator polynomials in octal, MSB tapping the current input.
    """

    def __init__(self, constraint_length: int = 3, polynomials: Sequence[int] = (0o7, 0o5)):
        self.K = constraint_length
        self.n = len(polynomials)
        self.memory = self.K - 1
        self.num_states = 2**self.memory
        self.generators = np.array(
            [[int(bit) for bit in bin(poly)[2:].zfill(self.K)] for poly in polynomials]
        )
        if self.generators.shape[1] != self.K:
            raise ValueError(f"generator polynomials must span {self.K} taps")

        # state = most recent input in the MSB
        states = np.arange(self.num_states)
        self.next_state = np.empty((self.num_states, 2), dtype=np.int64)
        self.outputs = np.empty((self.num_states, 2, self.n), dtype=np.int64)
        for s in states:
            register = [(s >> (self.memory - 1 - j)) & 1 for j in range(self.memory)]
            for u in (0, 1):
                taps = np.array([u, *register])
                self.outputs[s, u] = (self.generators @ taps) % 2
                self.next_state[s, u] = (u << (self.memory - 1)) | (s >> 1)

        # each next state is reached from exactly two (state, input) branches
        self.prev_state = np.empty((self.num_states, 2), dtype=np.int64)
        self.prev_input = np.empty(self.num_states, dtype=np.int64)
        for ns in states:
            sources = [(s, u) for s in states for u in (0, 1) if self.next_state[s, u] == ns]
            self.prev_state[ns] = [s for s, _ in sources]
            self.prev_input[ns] = sources[0][1]

    def coded_length(self, n_info: int) -> int:
        return self.n * (n_info + self.memory)

    def info_length(self, n_coded: int) -> int:
        return n_coded // self.n - self.memory

    def encode(self, bits) -> np.ndarray:
        """Encodes ``bits`` and appends the ``K-1`` flush bits; outputs are interleaved."""
        bits = np.asarray(bits, dtype=np.int64).reshape(-1)
        if np.any((bits != 0) & (bits != 1)):
            raise InvalidInputError("input must contain only 0/1 bits")
        padded = np.concatenate([bits, np.zeros(self.memory, dtype=np.int64)])
        streams = [np.convolve(padded, g)[: padded.size] % 2 for g in self.generators]
        return np.column_stack(streams).reshape(-1)

    def decode(self, llrs, n_info: Optional[int] = None) -> np.ndarray:
        """Maximum-likelihood decoding from bit LLRs (positive favours 0).

        Args:
            llrs: Coded-bit LLRs, ``n`` per trellis step, tail included.
            n_info: Expected payload length; checked against ``len(llrs)``.

        Returns:
            Decoded payload bits without the tail.
        """
        llrs = np.asarray(llrs, dtype=float).reshape(-1)
        if llrs.size % self.n or llrs.size < self.n * (self.memory + 1):
            raise InvalidInputError(
                f"LLR length {llrs.size} is not a terminated rate-1/{self.n} codeword"
            )
        if n_info is not None and llrs.size != self.coded_length(n_info):
            raise InvalidInputError(
                f"LLR length {llrs.size} does not match {n_info} payload bits"
            )
        steps = llrs.size // self.n
        received = llrs.reshape(steps, self.n)
        signs = 1 - 2 * self.outputs  # (states, 2, n)

        metrics = np.full(self.num_states, np.inf)
        metrics[0] = 0.0
        decisions = np.empty((steps, self.num_states), dtype=np.int64)
        prev = self.prev_state
        branch_input = self.prev_input
        for t in range(steps):
            # cost of every (state, input) branch, lower is better
            branch = -0.5 * np.einsum("sun,n->su", signs, received[t])
            candidates = metrics[prev] + branch[prev, branch_input[:, None]]
            choice = np.argmin(candidates, axis=1)
            decisions[t] = choice
            metrics = candidates[np.arange(self.num_states), choice]

        state = 0
        bits = np.empty(steps, dtype=np.int64)
        for t in range(steps - 1, -1, -1):
            bits[t] = branch_input[state]
            state = prev[state, decisions[t, state]]
        return bits[: steps - self.memory]


CODE_75 = ConvolutionalCode(3, (0o7, 0o5))


def conv75_encode(bits) -> np.ndarray:
    """(7,5) octal, constraint length 3, two flush bits."""
    return CODE_75.encode(bits)


def viterbi75_decode(llrs, n_info: Optional[int] = None) -> np.ndarray:
    return CODE_75.decode(llrs, n_info)

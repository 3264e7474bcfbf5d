"""Benchmark tests for the SS-OTFS simulation kernels.

Timings are printed for inspection; the assertions only guard against
pathological slowdowns.
"""

import os
import time

import numpy as np
import psutil
import pytest

from ssotfs_cli.experiments.fer import fer_experiment
from ssotfs_cli.phy.channel import apply_comm_channel, sample_scenario
from ssotfs_cli.phy.comm.detection import mp_detect
from ssotfs_cli.phy.comm.effective import build_effective_dd_channel
from ssotfs_cli.phy.constellation import BPSK
from ssotfs_cli.phy.otfs import FrameParams, td_to_dd
from ssotfs_cli.phy.tx import (
    antenna_power,
    build_precoder_set,
    equal_power_allocation,
    exact_estimates,
    full_tx_chain,
)


def _format_benchmark_results(title: str, count: int, duration: float, memory_mb: float) -> None:
    print(f"\n{'=' * 50}")
    print(f"Benchmark: {title}")
    print(f"{'=' * 50}")
    print(f"Iterations: {count}")
    print(f"Duration: {duration:.2f} seconds")
    print(f"Memory used: {memory_mb:.2f} MB")
    print(f"Iterations/second: {count / duration if duration > 0 else 0:.2f}")
    print(f"{'=' * 50}\n")


def _rss_mb() -> float:
    return psutil.Process(os.getpid()).memory_info().rss / 1024 / 1024


class TestKernelBenchmarks:
    """Throughput of the per-frame transmit, channel and detection chain."""

    @pytest.mark.benchmark
    @pytest.mark.slow
    def test_benchmark_full_frame_chain(self):
        """Precode, spread, propagate and detect frames on the default 32 x 16 grid."""
        params = FrameParams(M=32, N=16, n_bs=128)
        rng = np.random.default_rng(0)
        scenario = sample_scenario(params, 1, 4, rng, doppler="integer")
        beams = [(a,) for a in scenario.tx_indices()]
        alpha = antenna_power(beams, equal_power_allocation(4, params.alpha_total), params.n_bs)
        precoders = build_precoder_set(exact_estimates(scenario), "distinct", params)
        channel = build_effective_dd_channel(scenario, 0, precoders, alpha)

        start_time, start_memory = time.time(), _rss_mb()
        frames, errors = 10, 0
        for _ in range(frames):
            x = BPSK.random_symbols(params.mn, rng)
            s = full_tx_chain(x, precoders, alpha, params)
            y = td_to_dd(apply_comm_channel(scenario, 0, s, 1e-3, rng), params)
            errors += int(np.sum(mp_detect(y, channel, BPSK, 1e-3).symbols != x))
        duration = time.time() - start_time
        _format_benchmark_results("full frame chain", frames, duration, _rss_mb() - start_memory)

        assert duration < 120
        assert errors / (frames * params.mn) < 0.05

    @pytest.mark.benchmark
    @pytest.mark.slow
    def test_benchmark_fer_point(self, make_config):
        """One coded FER point on a 16 x 8 grid."""
        config = make_config(
            "fer", frame={"M": 16, "N": 8}, P=4, snr_db=[6], trials=20, precoding=["distinct"]
        )
        start_time, start_memory = time.time(), _rss_mb()
        table = fer_experiment(config)
        duration = time.time() - start_time
        _format_benchmark_results("coded FER point", config.trials, duration, _rss_mb() - start_memory)

        assert len(table) == 1
        assert duration < 300

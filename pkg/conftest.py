"""Pytest configuration and shared fixtures for the SS-OTFS tests.

Small frames keep the dense reference matrices cheap; every random draw
comes from a fixed seed.
"""

import numpy as np
import pytest

from ssotfs_cli.harness.config import ExperimentConfig
from ssotfs_cli.phy.otfs import FrameParams
from tests.fixtures import oracles


@pytest.fixture
def rng():
    """Seeded generator, fresh for every test."""
    return np.random.default_rng(1234)


@pytest.fixture
def small_params():
    """4 x 4 frame on 8 antennas."""
    return FrameParams(M=4, N=4, n_bs=8)


@pytest.fixture
def tiny_params():
    """2 x 2 frame on 4 antennas (small enough for exhaustive search)."""
    return FrameParams(M=2, N=2, n_bs=4)


@pytest.fixture
def dense():
    """Dense reference matrices (DFT, Kronecker, shift and phase)."""
    return oracles


@pytest.fixture
def make_config():
    """Builds a validated config from keyword overrides."""

    def _make(kind: str, **overrides) -> ExperimentConfig:
        data = {"kind": kind, "seed": 42}
        data.update(overrides)
        return ExperimentConfig.from_dict(data)

    return _make

"""Sensing-assisted receiver: effective channel, detectors and channel coding."""

from ssotfs_cli.phy.comm.coding import ConvolutionalCode, conv75_encode, viterbi75_decode
from ssotfs_cli.phy.comm.detection import DetectionResult, ml_detect, mmse_detect, mp_detect
from ssotfs_cli.phy.comm.effective import (
    DDTap,
    EffectiveDDChannel,
    build_effective_dd_channel,
    effective_channel_from_paths,
    effective_shift,
    xi_apply,
)

__all__ = [
    "ConvolutionalCode",
    "DDTap",
    "DetectionResult",
    "EffectiveDDChannel",
    "build_effective_dd_channel",
    "conv75_encode",
    "effective_channel_from_paths",
    "effective_shift",
    "ml_detect",
    "mmse_detect",
    "mp_detect",
    "viterbi75_decode",
    "xi_apply",
]

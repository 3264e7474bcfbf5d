"""
SS-OTFS CLI - Spatially-spread OTFS for sensing-assisted transmission
Monte-Carlo simulation library for integrated sensing and communication with OTFS.
"""

from ssotfs_cli.__version__ import __version__, __version_info__
from ssotfs_cli.phy.otfs import FrameParams

__all__ = ["FrameParams", "__version__", "__version_info__"]

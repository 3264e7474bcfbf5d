"""Physical-layer building blocks of the spatially-spread OTFS system."""

from ssotfs_cli.phy.otfs import FrameParams, dd_to_td, td_to_dd

__all__ = ["FrameParams", "dd_to_td", "td_to_dd"]

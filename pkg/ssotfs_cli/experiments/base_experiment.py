"""Base experiment interface."""

import logging
from abc import ABC, abstractmethod

from ssotfs_cli.__version__ import __version__
from ssotfs_cli.harness.config import ExperimentConfig
from ssotfs_cli.harness.results import ResultTable


class BaseExperiment(ABC):
    """Abstract base class for seeded Monte-Carlo experiments."""

    kind: str = ""

    def __init__(self, config: ExperimentConfig, progress: bool = False):
        """
        Initialize the experiment with a validated configuration.

        Args:
            config: Experiment configuration (seed included).
            progress: Show per-point trial progress bars.
        """
        self.config = config
        self.progress = progress
        self.logger = logging.getLogger(self.__class__.__module__)

    def new_table(self) -> ResultTable:
        table = ResultTable()
        table.metadata["kind"] = self.config.kind
        table.metadata["seed"] = str(self.config.seed)
        table.metadata["config_hash"] = self.config.config_hash()
        table.metadata["version"] = __version__
        return table

    @abstractmethod
    def run(self) -> ResultTable:
        """
        Runs every series and point of the experiment.

        Returns:
            ResultTable with one row per (series, x) point.
        """
        pass

"""Dispatch from experiment kind to driver."""

import logging
import time
from typing import Dict, Type

from ssotfs_cli.experiments import (
    AoaDemoExperiment,
    BaseExperiment,
    DeterminantExperiment,
    FerExperiment,
    MissDetectionExperiment,
)
from ssotfs_cli.harness.config import ExperimentConfig
from ssotfs_cli.harness.results import ResultTable

logger = logging.getLogger(__name__)

EXPERIMENTS: Dict[str, Type[BaseExperiment]] = {
    cls.kind: cls
    for cls in (AoaDemoExperiment, MissDetectionExperiment, FerExperiment, DeterminantExperiment)
}


def run_experiment(config: ExperimentConfig, progress: bool = False) -> ResultTable:
    """Runs the experiment named by ``config.kind``.

    Trials are spread over ``config.threads`` worker processes; the table does
    not depend on that number.
    """
    try:
        experiment_cls = EXPERIMENTS[config.kind]
    except KeyError:
        raise ValueError(f"No experiment registered for kind {config.kind!r}") from None
    logger.info(f"Running {config.kind} (seed={config.seed}, workers={config.threads})")
    start = time.perf_counter()
    table = experiment_cls(config, progress=progress).run()
    logger.info(f"{config.kind} finished in {time.perf_counter() - start:.2f} s with {len(table)} rows")
    return table

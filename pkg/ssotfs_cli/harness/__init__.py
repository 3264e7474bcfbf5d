"""Configuration, result tables and experiment dispatch.

``run_experiment`` lives in :mod:`ssotfs_cli.harness.runner`.
"""

from ssotfs_cli.harness.config import ExperimentConfig, parse_config
from ssotfs_cli.harness.results import ResultRow, ResultTable, emit_csv, read_csv, wilson_interval

__all__ = [
    "ExperimentConfig",
    "ResultRow",
    "ResultTable",
    "emit_csv",
    "parse_config",
    "read_csv",
    "wilson_interval",
]

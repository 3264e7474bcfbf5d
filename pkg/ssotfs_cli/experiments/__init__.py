from ssotfs_cli.experiments.aoa_demo import AoaDemoExperiment, aoa_demo
from ssotfs_cli.experiments.base_experiment import BaseExperiment
from ssotfs_cli.experiments.det_eval import DeterminantExperiment, avg_determinant_experiment
from ssotfs_cli.experiments.fer import FerExperiment, fer_experiment
from ssotfs_cli.experiments.miss_detection import MissDetectionExperiment, miss_detection_experiment

__all__ = [
    "AoaDemoExperiment",
    "BaseExperiment",
    "DeterminantExperiment",
    "FerExperiment",
    "MissDetectionExperiment",
    "aoa_demo",
    "avg_determinant_experiment",
    "fer_experiment",
    "miss_detection_experiment",
]

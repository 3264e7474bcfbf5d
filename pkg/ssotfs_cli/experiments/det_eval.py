"""Average determinant of the codeword difference matrix with and without precoding."""

import itertools
from functools import partial
from typing import List, Optional, Sequence

import numpy as np

from ssotfs_cli.experiments.base_experiment import BaseExperiment
from ssotfs_cli.experiments.common import mean_and_half_width, series_name
from ssotfs_cli.harness.config import ExperimentConfig
from ssotfs_cli.harness.results import ResultTable
from ssotfs_cli.phy.analysis import codeword_diff_matrix, error_sequence
from ssotfs_cli.phy.channel import Path
from ssotfs_cli.phy.otfs import FrameParams
from ssotfs_cli.phy.tx import PathEstimate, PrecoderSpec, build_precoder_set
from ssotfs_cli.utils.errors import ConfigurationError
from ssotfs_cli.utils.parallel import map_trials
from ssotfs_cli.utils.rng import trial_rng

# precoded: random delays and fractional Dopplers, exact-estimate precoder with random distinct
# virtual indices. random-delay and distinct-delay: no precoding.
DET_POLICIES = ("precoded", "random-delay", "distinct-delay")
BOUND_SERIES = "bound"
_DOPPLER_ATTEMPTS = 1000
_RELATIVE_TOL = 1e-6


def draw_paths(
    rng,
    P: int,
    l_max: int,
    k_max: int,
    min_separation: float = 0.2,
    distinct_delays: bool = False,
    fractional: bool = True,
) -> List[Path]:
    """Paths whose total Doppler values are pairwise at least ``min_separation`` apart.

    Distinct delays come from ``0..max(l_max, P-1)`` so that every ``P`` is feasible.
    """
    if distinct_delays:
        delays = rng.choice(max(l_max, P - 1) + 1, P, replace=False)
    else:
        delays = rng.integers(0, l_max + 1, P)
    for _ in range(_DOPPLER_ATTEMPTS):
        k = rng.integers(0, k_max + 1, P)
        kappa = rng.uniform(-0.5, 0.5, P) if fractional else np.zeros(P)
        nu = k + kappa
        gaps = [abs(a - b) for a, b in itertools.combinations(nu, 2)]
        if not gaps or min(gaps) >= min_separation:
            break
    else:
        raise ConfigurationError(
            f"could not draw {P} Doppler values {min_separation} apart with k_max={k_max}",
            field="min_doppler_separation",
        )
    h = (rng.standard_normal(P) + 1j * rng.standard_normal(P)) / np.sqrt(2 * P)
    return [
        Path(h=complex(h[p]), phi=0.0, l=int(delays[p]), k=int(k[p]), kappa=float(kappa[p]))
        for p in range(P)
    ]


def exact_precoders(paths: Sequence[Path], params: FrameParams, rng) -> List[PrecoderSpec]:
    """Exact-estimate precoders with random distinct virtual indices, one per path."""
    estimates = [PathEstimate(0, p, p + 1, path.l, path.nu) for p, path in enumerate(paths)]
    mapping = build_precoder_set(estimates, "random", params, rng=rng)
    return [mapping[p + 1] for p in range(len(paths))]


def determinants(
    paths: Sequence[Path],
    precoders: Optional[Sequence[PrecoderSpec]],
    repeats: Sequence[int],
    params: FrameParams,
) -> tuple:
    """``det(omega)`` for each error sequence of ``repeats`` pattern copies."""
    values = []
    for j in repeats:
        e = error_sequence(j, params.mn)
        omega = codeword_diff_matrix(e, paths, precoders, 1.0, params).omega
        values.append(float(np.real(np.linalg.det(omega))))
    return tuple(values)


def _det_trial(config: ExperimentConfig, P: int, policy: str, trial: int) -> tuple:
    params = config.frame
    rng = trial_rng(config.seed, P, DET_POLICIES.index(policy), trial)
    paths = draw_paths(
        rng,
        P,
        config.l_max,
        config.k_max,
        config.min_doppler_separation,
        distinct_delays=policy == "distinct-delay",
        fractional=config.doppler == "fractional",
    )
    precoders = exact_precoders(paths, params, rng) if policy == "precoded" else None
    return determinants(paths, precoders, config.error_repeats, params)


def avg_determinant_experiment(config: ExperimentConfig, progress: bool = False) -> ResultTable:
    """Mean ``det(omega)`` versus ``d_E^2`` per path count and policy, plus the ``(d_E^2)^P`` bound.

    The error sequence is ``(2, 0, -2)`` repeated ``j`` times and zero-padded,
    so ``d_E^2 = 8 j``.
    """
    return DeterminantExperiment(config, progress).run()


class DeterminantExperiment(BaseExperiment):
    kind = "det-eval"

    def run(self) -> ResultTable:
        config = self.config
        table = self.new_table()
        table.metadata["x"] = "d_e_sq"
        table.metadata["metric"] = "mean_determinant"
        distances = [8.0 * j for j in config.error_repeats]

        for P in config.p_values:
            for policy in DET_POLICIES:
                outcomes = map_trials(
                    partial(_det_trial, config, P, policy),
                    config.trials,
                    workers=config.threads,
                    progress=self.progress,
                    desc=f"P={P} {policy}",
                )
                name = series_name(P=P, policy=policy)
                for column, d_e_sq in enumerate(distances):
                    values = [o[column] for o in outcomes]
                    violations = sum(v > d_e_sq**P * (1 + _RELATIVE_TOL) for v in values)
                    if violations:
                        self.logger.warning(
                            f"{name}: {violations} draws exceed the determinant bound "
                            f"at d_E^2={d_e_sq:g}"
                        )
                    mean, half = mean_and_half_width(values)
                    table.add(name, d_e_sq, mean, len(values), half)
                self.logger.info(f"P={P} {policy}: done ({config.trials} draws)")

            for d_e_sq in distances:
                table.add(series_name(P=P, policy=BOUND_SERIES), d_e_sq, d_e_sq**P, 0)
        return table

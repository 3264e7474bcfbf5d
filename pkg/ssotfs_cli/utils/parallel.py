import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, TypeVar

from tqdm import tqdm

logger = logging.getLogger(__name__)

T = TypeVar("T")


def map_trials(
    fn: Callable[[int], T],
    n_trials: int,
    workers: int = 1,
    progress: bool = False,
    desc: str = "trials",
) -> List[T]:
    """Evaluates ``fn(trial_index)`` for every trial and returns results in trial order.

    ``fn`` must be picklable when ``workers > 1`` (a module level function or a
    ``functools.partial`` of one). Reductions over the returned list are left to
    the caller so that the outcome is independent of the worker count.

    Args:
        fn: Per-trial callable.
        n_trials: Number of trials, indices ``0..n_trials-1``.
        workers: Number of worker processes; 1 runs inline.
        progress: Show a tqdm progress bar.
        desc: Progress bar label.

    Returns:
        List of per-trial results.
    """
    if n_trials <= 0:
        return []
    workers = max(1, min(int(workers), n_trials))
    if workers == 1:
        return [fn(t) for t in tqdm(range(n_trials), desc=desc, disable=not progress, leave=False)]

    chunksize = max(1, math.ceil(n_trials / (workers * 4)))
    logger.debug(f"Dispatching {n_trials} {desc} over {workers} workers (chunksize={chunksize})")
    with ProcessPoolExecutor(max_workers=workers) as executor:
        results = executor.map(fn, range(n_trials), chunksize=chunksize)
        return list(tqdm(results, total=n_trials, desc=desc, disable=not progress, leave=False))

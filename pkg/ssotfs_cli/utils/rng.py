import numpy as np


def trial_rng(seed: int, *keys: int) -> np.random.Generator:
    """Returns an independent generator for the stream addressed by ``keys``.

    Streams are derived from ``SeedSequence([seed, *keys])`` so the draw for a
    given (point, trial) never depends on which worker evaluates it.
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed), *(int(k) for k in keys)]))


def as_generator(rng) -> np.random.Generator:
    """Accepts a seed, a ``SeedSequence`` or a generator."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)

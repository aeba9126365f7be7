"""Seed handling helpers.

Every stochastic routine in the package accepts a ``seed`` that may be an int,
``None``, a ``numpy.random.SeedSequence``, or an already-constructed
``numpy.random.Generator``.  Experiments derive independent substreams from a
master seed with ``spawn_seeds`` so that parallel execution order cannot
change results.
"""

import numpy as np


def as_rng(seed):
    """Return a Generator for any accepted seed form."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def spawn_seeds(seed, count):
    """Split ``seed`` into ``count`` independent child SeedSequences."""
    if isinstance(seed, np.random.SeedSequence):
        return seed.spawn(count)
    return np.random.SeedSequence(seed).spawn(count)

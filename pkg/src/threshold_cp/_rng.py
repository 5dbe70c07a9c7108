"""Seeded random streams keyed by integer tuples."""

import numpy as np

SEED_MASK = (1 << 64) - 1


def make_rng(seed, *key):
    """Return an independent ``numpy.random.Generator`` for ``(seed, *key)``.

    Streams with distinct keys are statistically independent, and the same
    ``(seed, key)`` always reproduces the same stream.
    """
    seed = int(seed) & SEED_MASK
    key = tuple(int(k) & SEED_MASK for k in key)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def derive_seed(seed, *key):
    """Collapse ``(seed, *key)`` into one 64-bit seed (for recording in outputs)."""
    seed = int(seed) & SEED_MASK
    key = tuple(int(k) & SEED_MASK for k in key)
    state = np.random.SeedSequence(seed, spawn_key=key).generate_state(2, dtype=np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


def as_rng(rng):
    """Accept a Generator, an int seed, or None."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)

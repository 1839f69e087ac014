"""Deterministic random-stream derivation from a single master seed.

Every stochastic component pulls its generator through ``derive``, keyed
by a readable tag path (e.g. ``derive(seed, "episode", 3, "candidates")``),
so any sub-run can be reproduced in isolation.
"""

import hashlib

import numpy as np


def derive_seed(master_seed, *tags):
    """Map (master_seed, tags...) to a 64-bit child seed, stable across runs."""
    h = hashlib.sha256()
    h.update(str(int(master_seed)).encode())
    for tag in tags:
        h.update(b"/")
        h.update(str(tag).encode())
    return int.from_bytes(h.digest()[:8], "little")


def derive(master_seed, *tags):
    """A fresh ``np.random.Generator`` for the given tag path."""
    return np.random.default_rng(derive_seed(master_seed, *tags))


def rng_state(rng):
    """JSON-serializable snapshot of a generator's state."""
    return rng.bit_generator.state


def restore_rng(state):
    rng = np.random.default_rng(0)
    rng.bit_generator.state = state
    return rng


def as_rng(seed_or_rng):
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)

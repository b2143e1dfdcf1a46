"""Seeded random streams.

Every stream is a Philox (counter-based) generator keyed by a 64-bit seed.
Per-trial seeds are derived from a master seed and an integer key path
through numpy's SeedSequence hashing, so trial ``t`` gets the same stream no
matter which worker runs it or in what order.
"""

import numpy as np

SEED_MASK = (1 << 64) - 1


def make_rng(seed):
    return np.random.Generator(np.random.Philox(int(seed) & SEED_MASK))


def derive_seed(master_seed, *keys):
    """Hash ``(master_seed, *keys)`` into a fresh 64-bit seed."""
    ss = np.random.SeedSequence(int(master_seed) & SEED_MASK, spawn_key=tuple(int(k) for k in keys))
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return (int(hi) << 32) | int(lo)


def as_rng(seed_or_rng):
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return make_rng(0 if seed_or_rng is None else seed_or_rng)

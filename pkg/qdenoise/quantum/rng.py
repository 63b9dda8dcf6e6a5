"""
Seed derivation shared by every stochastic step of the pipeline.

All randomness comes from numpy's PCG64 bit generator. Independent streams
are derived with ``SeedSequence`` so that sample ``i`` of a dataset only
depends on ``(global_seed, i)``, never on which worker produced it.
"""
from __future__ import annotations

import numpy as np

U64_MASK = (1 << 64) - 1


def derive_seed(*words: int) -> int:
    """Hashes a tuple of non-negative integers into one unsigned 64-bit seed."""
    if not words:
        raise ValueError("derive_seed needs at least one word.")
    if any(w < 0 for w in words):
        raise ValueError(f"Seed words must be non-negative, got {words}.")
    state = np.random.SeedSequence([int(w) & U64_MASK for w in words]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & U64_MASK))

"""Deterministic seed derivation.

All randomness in the toolkit flows through numpy's PCG64 generator,
seeded from 64-bit integers. Sub-streams (one per utterance, one per
k-means repetition, one per sweep cell) are derived with the SplitMix64
finalizer, which is platform-stable and collision-resistant for the
handful of indices we use.
"""

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def derive_seed(seed: int, index: int) -> int:
    """Mix (seed, index) into a new 64-bit seed via SplitMix64."""
    z = (seed + (index + 1) * _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator for a 64-bit seed."""
    return np.random.Generator(np.random.PCG64(seed & _MASK64))

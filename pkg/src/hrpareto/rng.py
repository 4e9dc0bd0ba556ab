"""Counter-based deterministic random streams.

The estimators in this package promise bit-identical results for a given
seed no matter how the work is batched or parallelized, so stateful
generators are out. Instead every variate is a pure function of
``(stream seed, counter)`` through the splitmix64 finalizer, vectorized on
``uint64`` arrays. Sub-streams for independent estimator terms are derived
by hashing integer tags into the seed.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK = 0xFFFFFFFFFFFFFFFF

_TWO_POW_MINUS_53 = 2.0**-53
_TWO_POW_MINUS_54 = 2.0**-54


def raw_words(seed: int, counters) -> np.ndarray:
    """splitmix64 words for the given counters, as a uint64 array."""
    c = np.asarray(counters, dtype=np.uint64)
    z = np.uint64(seed & _MASK) + (c + np.uint64(1)) * _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def derive_stream(seed: int, *tags: int) -> int:
    """Derive a sub-stream seed from a base seed and integer tags."""
    h = seed & _MASK
    for t in tags:
        h = int(raw_words(h, np.asarray([t & _MASK], dtype=np.uint64))[0])
    return h


def uniforms(seed: int, counters) -> np.ndarray:
    """Uniform floats strictly inside (0, 1), one per counter."""
    w = raw_words(seed, counters)
    return (w >> np.uint64(11)).astype(np.float64) * _TWO_POW_MINUS_53 + _TWO_POW_MINUS_54


def standard_normals(seed: int, counters_a, counters_b) -> np.ndarray:
    """Standard normals via Box-Muller from two counter lanes.

    Only the cosine branch is used; each normal consumes two counters.
    """
    u1 = uniforms(seed, counters_a)
    u2 = uniforms(seed, counters_b)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)

"""Deterministic derivation of per-item RNG substreams from one master seed.

Sampling and mixing fan out into many independent random streams (one per RR
set). Substream seeds come from ``numpy.random.SeedSequence`` so that parallel
and serial executions, and repeated runs with the same master seed, produce
identical results.
"""

from __future__ import annotations

import random

import numpy as np

_MASTER_BITS = 63


def coerce_master_seed(rng: int | random.Random | None) -> int:
    """Turn an int seed, an existing stream, or None into a master seed."""
    if rng is None:
        return random.getrandbits(_MASTER_BITS)
    if isinstance(rng, random.Random):
        return rng.getrandbits(_MASTER_BITS)
    if isinstance(rng, bool) or not isinstance(rng, int):
        raise TypeError(f"expected int, random.Random, or None, got {type(rng).__name__}")
    if rng < 0:
        raise ValueError("master seed must be non-negative")
    return rng


def spawn_seed_array(master: int, count: int, *stream_labels: int) -> np.ndarray:
    """Derive ``count`` independent 64-bit substream seeds for (master, labels)."""
    entropy = (master, *stream_labels) if stream_labels else master
    return np.random.SeedSequence(entropy).generate_state(count, dtype=np.uint64)


def spawn_rng(master: int, *stream_labels: int) -> random.Random:
    """A single derived ``random.Random`` stream for (master, labels)."""
    return random.Random(int(spawn_seed_array(master, 1, *stream_labels)[0]))

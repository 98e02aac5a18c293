"""Greedy max-coverage seed selection and the sample-size policy.

Selection is lazy greedy: a priority queue of stale upper bounds on marginal
coverage, refreshed on pop. A popped bound that is already fresh for the
current iteration is the true argmax, so the output (including smallest-id
tie-breaking) matches a naive rescan exactly.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass

from .graph import Graph
from .rr import RRCollection, build_collection
from .seeding import coerce_master_seed, spawn_seed_array

_MAX_DOUBLINGS = 20


@dataclass(slots=True)
class SelectionResult:
    """Ordered seeds with per-step coverage gains and the RR influence estimate."""

    seeds: list[int]
    marginal_coverage: list[int]
    total_coverage: int
    rr_influence_estimate: float


@dataclass(slots=True)
class SampleSizePolicy:
    """How many RR sets to draw before selection.

    ``fixed`` returns ``fixed_n``. ``doubling`` starts at
    ceil(c0 * n * log2(n) / epsilon^2) and doubles until the greedy influence
    estimate moves by less than ``stability_threshold`` (relative) between
    consecutive sizes. A threshold >= 1 accepts the starting size outright.
    """

    mode: str = "fixed"
    fixed_n: int = 10_000
    epsilon: float = 0.1
    ell: int = 1
    stability_threshold: float = 0.01
    c0: float = 1.0

    def __post_init__(self):
        if self.mode not in ("fixed", "doubling"):
            raise ValueError(f"unknown sample-size mode {self.mode!r}")
        if self.mode == "fixed" and self.fixed_n < 1:
            raise ValueError("fixed_n must be >= 1")
        if self.epsilon <= 0.0:
            raise ValueError("epsilon must be positive")
        if self.stability_threshold <= 0.0:
            raise ValueError("stability_threshold must be positive")


def greedy_select(collection: RRCollection, k: int) -> SelectionResult:
    """Pick up to ``k`` seeds by lazy greedy marginal coverage.

    Stops early once every set is covered (zero marginal gain). Ties break
    toward the smallest node id.
    """
    if k < 1:
        raise ValueError("budget k must be >= 1")
    index = collection.inverted_index
    n_sets = len(collection.sets)
    seeds: list[int] = []
    gains: list[int] = []
    total = 0
    if n_sets == 0:
        return SelectionResult(seeds, gains, 0, 0.0)
    covered = bytearray(n_sets)
    # (negated stale bound, node, iteration the bound was computed in)
    heap = [(-len(ids), v, 0) for v, ids in enumerate(index) if ids]
    heapq.heapify(heap)
    while heap and len(seeds) < k and total < n_sets:
        neg_bound, v, stamp = heapq.heappop(heap)
        if stamp == len(seeds):
            gain = -neg_bound
            if gain == 0:
                break
            seeds.append(v)
            gains.append(gain)
            total += gain
            for i in index[v]:
                covered[i] = 1
            continue
        gain = 0
        for i in index[v]:
            if not covered[i]:
                gain += 1
        heapq.heappush(heap, (-gain, v, len(seeds)))
    estimate = collection.n * total / n_sets
    return SelectionResult(seeds, gains, total, estimate)


def decide_sample_size(
    g: Graph,
    k: int,
    policy: SampleSizePolicy,
    rng: int | random.Random | None,
) -> int:
    """Resolve the policy to a concrete collection size for this graph."""
    if policy.mode == "fixed":
        return policy.fixed_n
    n = max(g.n, 2)
    size = max(1, math.ceil(policy.c0 * n * math.log2(n) / policy.epsilon**2))
    if policy.stability_threshold >= 1.0:
        return size
    master = coerce_master_seed(rng)
    previous = None
    for round_no in range(_MAX_DOUBLINGS):
        collection = build_collection(g, size, int(spawn_seed_array(master, 1, round_no)[0]))
        estimate = greedy_select(collection, k).rr_influence_estimate
        if previous is not None and abs(estimate - previous) <= policy.stability_threshold * abs(previous):
            return size
        previous = estimate
        size *= 2
    return size


def select_seeds_end_to_end(
    g: Graph,
    k: int,
    policy: SampleSizePolicy,
    rng: int | random.Random | None,
) -> tuple[SelectionResult, RRCollection]:
    """Decide the sample size, build the collection, and select seeds.

    Returns the collection too, so it can seed the next timestep's mixing.
    """
    master = coerce_master_seed(rng)
    decide_seed, build_seed = (int(s) for s in spawn_seed_array(master, 2))
    size = decide_sample_size(g, k, policy, decide_seed)
    collection = build_collection(g, size, build_seed)
    return greedy_select(collection, k), collection

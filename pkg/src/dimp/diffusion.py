"""Ground-truth influence evaluation.

Monte Carlo simulation of the independent cascade process for experiment
metrics, plus exact live-edge-world enumeration oracles for desk-scale
verification of the RR machinery. IC spread equals forward reachability in a
random live-edge graph, and an RR set equals reverse reachability from its
root in the same world, so one world enumeration verifies both sides.
"""

from __future__ import annotations

import math
import multiprocessing
import random
from dataclasses import dataclass

from .errors import CapacityError
from .graph import Graph
from .seeding import spawn_seed_array

EXACT_EDGE_LIMIT = 25


@dataclass(frozen=True, slots=True)
class SeedSet:
    """A chosen seed node set with its budget."""

    nodes: frozenset[int]
    k: int

    def __post_init__(self):
        object.__setattr__(self, "nodes", frozenset(self.nodes))
        if self.k < 0:
            raise ValueError("budget k must be non-negative")
        if len(self.nodes) > self.k:
            raise ValueError(f"seed set of size {len(self.nodes)} exceeds budget k={self.k}")

    @classmethod
    def of(cls, *nodes: int) -> "SeedSet":
        return cls(frozenset(nodes), len(set(nodes)))


@dataclass(frozen=True, slots=True)
class InfluenceEstimate:
    mean: float
    stderr: float
    r: int


def simulate_ic_once(g: Graph, seeds: SeedSet, rng: random.Random) -> int:
    """One independent cascade run; returns the activated count (seeds included)."""
    if not seeds.nodes:
        raise ValueError("seed set must be nonempty")
    out_adj = g._out_adj
    if out_adj is None:
        g._require_weights()
    rand = rng.random
    active = bytearray(g.n)
    frontier = []
    for s in seeds.nodes:
        if not (0 <= s < g.n):
            raise ValueError(f"seed node {s} outside [0, {g.n})")
        active[s] = 1
        frontier.append(s)
    count = len(frontier)
    while frontier:
        u = frontier.pop()
        for v, p in out_adj[u]:
            if not active[v] and rand() < p:
                active[v] = 1
                count += 1
                frontier.append(v)
    return count


def estimate_influence_mc(g: Graph, seeds: SeedSet, r: int, rng: random.Random) -> InfluenceEstimate:
    """Mean and standard error of ``r`` independent cascade simulations."""
    if r < 1:
        raise ValueError("simulation count r must be >= 1")
    total = 0
    total_sq = 0
    for _ in range(r):
        x = simulate_ic_once(g, seeds, rng)
        total += x
        total_sq += x * x
    mean = total / r
    if r == 1:
        return InfluenceEstimate(mean, 0.0, r)
    var = (total_sq - total * total / r) / (r - 1)
    stderr = math.sqrt(max(var, 0.0) / r)
    return InfluenceEstimate(mean, stderr, r)


# Worker state is inherited through fork, so the graph is never pickled.
_mc_state: tuple[Graph, SeedSet] | None = None


def _mc_chunk(args: tuple[int, int]) -> tuple[int, int]:
    r_chunk, seed = args
    g, seeds = _mc_state
    rng = random.Random(seed)
    total = 0
    total_sq = 0
    for _ in range(r_chunk):
        x = simulate_ic_once(g, seeds, rng)
        total += x
        total_sq += x * x
    return total, total_sq


def estimate_influence_mc_parallel(
    g: Graph,
    seeds: SeedSet,
    r: int,
    master_seed: int,
    workers: int,
) -> InfluenceEstimate:
    """estimate_influence_mc split across worker processes.

    Simulations are partitioned into ``workers`` chunks, each driven by the
    substream (master_seed, chunk index); the result is deterministic for a
    fixed (master_seed, workers) pair. Needs fork-style process start.
    """
    if r < 1:
        raise ValueError("simulation count r must be >= 1")
    workers = max(1, min(workers, r))
    chunk_seeds = [int(s) for s in spawn_seed_array(master_seed, workers)]
    base, extra = divmod(r, workers)
    tasks = [(base + (1 if i < extra else 0), chunk_seeds[i]) for i in range(workers)]
    if workers == 1:
        global _mc_state
        _mc_state = (g, seeds)
        parts = [_mc_chunk(tasks[0])]
        _mc_state = None
    else:
        parts = _run_mc_pool(g, seeds, tasks, workers)
    total = sum(p[0] for p in parts)
    total_sq = sum(p[1] for p in parts)
    mean = total / r
    if r == 1:
        return InfluenceEstimate(mean, 0.0, r)
    var = (total_sq - total * total / r) / (r - 1)
    return InfluenceEstimate(mean, math.sqrt(max(var, 0.0) / r), r)


def _run_mc_pool(g, seeds, tasks, workers):
    global _mc_state
    _mc_state = (g, seeds)
    try:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(workers) as pool:
            return pool.map(_mc_chunk, tasks)
    finally:
        _mc_state = None


def _check_capacity(g: Graph):
    g._require_weights()
    if g.m > EXACT_EDGE_LIMIT:
        raise CapacityError(f"exact enumeration supports at most {EXACT_EDGE_LIMIT} edges, got {g.m}")


def _world_probability(probs: list[float], mask: int) -> float:
    prob = 1.0
    for j, p in enumerate(probs):
        prob *= p if (mask >> j) & 1 else 1.0 - p
    return prob


def exact_influence_bruteforce(g: Graph, seeds: SeedSet) -> float:
    """Exact expected spread by enumerating all 2^|E| live-edge worlds."""
    _check_capacity(g)
    if not seeds.nodes:
        return 0.0
    edges = g.edges
    probs = [g.weight(u, v) for u, v in edges]
    seed_list = list(seeds.nodes)
    expected = 0.0
    for mask in range(1 << len(edges)):
        prob = _world_probability(probs, mask)
        if prob == 0.0:
            continue
        out = [[] for _ in range(g.n)]
        for j, (u, v) in enumerate(edges):
            if (mask >> j) & 1:
                out[u].append(v)
        active = bytearray(g.n)
        stack = []
        for s in seed_list:
            active[s] = 1
            stack.append(s)
        reached = len(stack)
        while stack:
            u = stack.pop()
            for v in out[u]:
                if not active[v]:
                    active[v] = 1
                    reached += 1
                    stack.append(v)
        expected += prob * reached
    return expected


def exact_rr_distribution(g: Graph, root: int) -> dict[frozenset[int], float]:
    """Exact distribution of the RR node-set for a fixed root.

    For each live-edge world the RR set is the set of nodes that reach the
    root via live edges; BFS-edge labeling is marginalized out.
    """
    _check_capacity(g)
    if not (0 <= root < g.n):
        raise ValueError(f"root {root} outside [0, {g.n})")
    edges = g.edges
    probs = [g.weight(u, v) for u, v in edges]
    dist: dict[frozenset[int], float] = {}
    for mask in range(1 << len(edges)):
        prob = _world_probability(probs, mask)
        if prob == 0.0:
            continue
        rev = [[] for _ in range(g.n)]
        for j, (u, v) in enumerate(edges):
            if (mask >> j) & 1:
                rev[v].append(u)
        reached = {root}
        stack = [root]
        while stack:
            v = stack.pop()
            for u in rev[v]:
                if u not in reached:
                    reached.add(u)
                    stack.append(u)
        key = frozenset(reached)
        dist[key] = dist.get(key, 0.0) + prob
    return dist

"""Shared builders and independent oracles for the test suite."""

from __future__ import annotations

import random

from dimp import (
    Graph,
    RRCollection,
    RRSet,
    UpdateBatch,
    WeightDelta,
    build_inverted_index,
    exact_rr_distribution,
)


def wgraph(n: int, weighted_edges) -> Graph:
    """Graph from (u, v, p) triples."""
    edges = [(u, v) for u, v, _ in weighted_edges]
    weights = {(u, v): p for u, v, p in weighted_edges}
    return Graph(n, edges, weights)


def fork_graph() -> Graph:
    # two in-edges into node 2, the running example everywhere below
    return wgraph(3, [(0, 2, 0.5), (1, 2, 0.5)])


def acceptance_graphs() -> dict[str, Graph]:
    """Five hand-built graphs, |E| <= 8, weights in the weighted-cascade range."""
    return {
        "fork": fork_graph(),
        "path8": wgraph(8, [
            (0, 1, 0.3), (1, 2, 0.35), (2, 3, 0.3), (3, 4, 0.25),
            (4, 5, 0.3), (5, 6, 0.35), (6, 7, 0.3), (0, 4, 0.25),
        ]),
        "dag8": wgraph(7, [
            (1, 0, 0.3), (2, 0, 0.35), (3, 1, 0.3), (4, 1, 0.25),
            (4, 2, 0.35), (5, 3, 0.3), (5, 4, 0.25), (6, 5, 0.35),
        ]),
        "ring8": wgraph(6, [
            (0, 1, 0.3), (1, 2, 0.35), (2, 3, 0.25), (3, 4, 0.3),
            (4, 5, 0.35), (5, 0, 0.3), (0, 3, 0.25), (2, 5, 0.3),
        ]),
        "dense5": wgraph(5, [
            (0, 1, 0.3), (1, 2, 0.35), (2, 0, 0.25), (3, 0, 0.3),
            (3, 1, 0.4), (4, 3, 0.45), (2, 4, 0.3), (1, 4, 0.25),
        ]),
    }


def halving_batch(g: Graph, edges, timestep: int = 1) -> UpdateBatch:
    """Halve the given edges' weights (the batch shape of the update rule)."""
    deltas = tuple(WeightDelta(u, v, g.weight(u, v), g.weight(u, v) / 2.0) for u, v in edges)
    return UpdateBatch(deltas, timestep=timestep, base_version=g.version)


def marginal_rr_distribution(g: Graph) -> dict[frozenset, float]:
    """Distribution of RR node-sets under a uniformly random root (exact)."""
    acc: dict[frozenset, float] = {}
    for root in range(g.n):
        for node_set, p in exact_rr_distribution(g, root).items():
            acc[node_set] = acc.get(node_set, 0.0) + p / g.n
    return acc


def tv_distance(d1: dict, d2: dict) -> float:
    keys = set(d1) | set(d2)
    return 0.5 * sum(abs(d1.get(k, 0.0) - d2.get(k, 0.0)) for k in keys)


def node_set_histogram(rr_sets) -> dict[frozenset, float]:
    hist: dict[frozenset, float] = {}
    total = 0
    for rr in rr_sets:
        hist[rr.nodes] = hist.get(rr.nodes, 0.0) + 1.0
        total += 1
    return {k: v / total for k, v in hist.items()}


def make_collection(node_sets, n: int) -> RRCollection:
    """Synthetic collection from raw node sets (coverage/greedy tests only)."""
    sets = [RRSet(min(s), frozenset(s), {}) for s in node_sets]
    return RRCollection(
        sets=sets,
        target_size=len(sets),
        inverted_index=build_inverted_index(sets, n),
        n=n,
        source_graph_version="test",
        master_seed=0,
    )


def naive_greedy(node_sets, k: int):
    """Reference greedy max coverage: full rescan, smallest-id tie-break."""
    sets = [frozenset(s) for s in node_sets]
    covered = [False] * len(sets)
    candidates = sorted({v for s in sets for v in s})
    seeds: list[int] = []
    gains: list[int] = []
    for _ in range(k):
        best_v = None
        best_gain = 0
        for v in candidates:
            if v in seeds:
                continue
            gain = sum(1 for i, s in enumerate(sets) if not covered[i] and v in s)
            if gain > best_gain:
                best_v, best_gain = v, gain
        if best_v is None:
            break
        seeds.append(best_v)
        gains.append(best_gain)
        for i, s in enumerate(sets):
            if best_v in s:
                covered[i] = True
    return seeds, gains


def random_in_tree(rng: random.Random, n: int) -> Graph:
    """Anti-arborescence toward node 0: every non-root has one out-edge."""
    triples = []
    for v in range(1, n):
        parent = rng.randrange(v)
        triples.append((v, parent, rng.uniform(0.05, 0.95)))
    return wgraph(n, triples)


def random_weighted_graph(
    rng: random.Random,
    max_nodes: int = 6,
    max_edges: int = 10,
    p_low: float = 0.1,
    p_high: float = 0.9,
) -> Graph:
    n = rng.randint(2, max_nodes)
    candidates = [(u, v) for u in range(n) for v in range(n) if u != v]
    rng.shuffle(candidates)
    m = rng.randint(1, min(max_edges, len(candidates)))
    triples = [(u, v, rng.uniform(p_low, p_high)) for u, v in candidates[:m]]
    return wgraph(n, triples)

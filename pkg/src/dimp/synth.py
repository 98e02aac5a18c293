"""Synthetic benchmark graphs for when no real dataset is on disk."""

from __future__ import annotations

import random

from .graph import Graph


def generate_synthetic_graph(
    n: int,
    mean_in_degree: int = 10,
    seed: int | None = 0,
    *,
    core: int = 5,
    uniform_mix: float = 0.5,
    sink_fraction: float = 0.0,
) -> Graph:
    """Preferential-attachment digraph with power-law-ish out-degrees.

    Nodes arrive one at a time; node v draws a geometric number of in-edges
    (mean ``mean_in_degree``) whose sources are existing nodes picked
    preferentially by out-degree, blended with a ``uniform_mix`` share of
    uniform picks. A ``sink_fraction`` share of nodes draw no in-edges at all
    (like never-cited papers in a citation graph), which keeps cascades under
    weighted-cascade weights subcritical. The first ``core`` nodes form a
    small complete digraph so early picks have somewhere to attach. Weights
    are left unassigned.
    """
    if n < 2:
        raise ValueError("need at least 2 nodes")
    if mean_in_degree < 1:
        raise ValueError("mean_in_degree must be >= 1")
    if not (0.0 <= sink_fraction < 1.0):
        raise ValueError("sink_fraction must lie in [0, 1)")
    core = min(core, n)
    rng = random.Random(seed)
    edges: list[tuple[int, int]] = []
    source_pool: list[int] = []  # one entry per out-edge, drives preferential picks
    for u in range(core):
        for v in range(core):
            if u != v:
                edges.append((u, v))
                source_pool.append(u)
    # Geometric mean among non-sink nodes, scaled so the overall mean holds.
    nonsink_mean = mean_in_degree / (1.0 - sink_fraction)
    continue_p = nonsink_mean / (nonsink_mean + 1.0)
    for v in range(core, n):
        if sink_fraction and rng.random() < sink_fraction:
            continue
        wanted = 0
        while rng.random() < continue_p:
            wanted += 1
        picked: set[int] = set()
        attempts = 0
        while len(picked) < wanted and attempts < 20 * (wanted + 1):
            attempts += 1
            if source_pool and rng.random() >= uniform_mix:
                u = source_pool[rng.randrange(len(source_pool))]
            else:
                u = rng.randrange(v)
            picked.add(u)
        for u in picked:
            edges.append((u, v))
            source_pool.append(u)
    return Graph(n, edges)

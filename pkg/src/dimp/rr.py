"""Reverse-reachable set sampling and collection management.

An RR set is drawn by a reverse BFS from a uniformly chosen root: pop a node,
examine each incoming edge, and activate the source with the edge's
probability. Each activation records its BFS edge (node -> the node that
pulled it in), which is all the per-set state the reuse layer needs.
"""

from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable

from .diffusion import SeedSet
from .graph import Graph
from .seeding import coerce_master_seed, spawn_seed_array


@dataclass(slots=True)
class RRSet:
    """One reverse-reachable sample: root, activated nodes, and BFS edges.

    ``bfs_parent[u] = v`` means u was activated while v's in-edges were being
    examined, i.e. (u, v) is an edge of the graph and following parents from
    any node reaches the root.
    """

    root: int
    nodes: frozenset[int]
    bfs_parent: dict[int, int]


@dataclass(slots=True)
class RRCollection:
    """A fixed-target-size list of RR sets plus a node -> set-indices index."""

    sets: list[RRSet]
    target_size: int
    inverted_index: list[list[int]]
    n: int
    source_graph_version: str
    master_seed: int


def sample_rr_set_from_root(g: Graph, root: int, rng: random.Random) -> RRSet:
    """Reverse BFS from a fixed root; FIFO queue, stored in-neighbor order."""
    in_adj = g._in_adj
    if in_adj is None:
        g._require_weights()
    if not (0 <= root < g.n):
        raise ValueError(f"root {root} outside [0, {g.n})")
    rand = rng.random
    nodes = {root}
    parent: dict[int, int] = {}
    queue = deque((root,))
    pop = queue.popleft
    push = queue.append
    while queue:
        v = pop()
        for u, p in in_adj[v]:
            if u not in nodes and rand() < p:
                nodes.add(u)
                parent[u] = v
                push(u)
    return RRSet(root, frozenset(nodes), parent)


def sample_rr_set(g: Graph, rng: random.Random) -> RRSet:
    """Reverse BFS from a uniformly random root."""
    if g.n < 1:
        raise ValueError("graph has no nodes")
    return sample_rr_set_from_root(g, rng.randrange(g.n), rng)


def build_inverted_index(sets: Iterable[RRSet], n: int) -> list[list[int]]:
    index: list[list[int]] = [[] for _ in range(n)]
    for i, rr in enumerate(sets):
        for v in rr.nodes:
            index[v].append(i)
    return index


def build_collection(g: Graph, n_r: int, rng: int | random.Random | None) -> RRCollection:
    """Draw ``n_r`` independent RR sets with per-set substreams.

    Substream i is derived from (master seed, i), so rebuilding with the same
    master seed reproduces every set, and sets could be drawn in parallel
    without changing the result.
    """
    if n_r < 1:
        raise ValueError("collection size n_r must be >= 1")
    g._require_weights()
    master = coerce_master_seed(rng)
    seeds = spawn_seed_array(master, n_r).tolist()
    n = g.n
    sets: list[RRSet] = []
    index: list[list[int]] = [[] for _ in range(n)]
    sub = random.Random()  # reseeded per set; same stream as random.Random(seed)
    for i in range(n_r):
        sub.seed(seeds[i])
        rr = sample_rr_set_from_root(g, sub.randrange(n), sub)
        for v in rr.nodes:
            index[v].append(i)
        sets.append(rr)
    return RRCollection(
        sets=sets,
        target_size=n_r,
        inverted_index=index,
        n=n,
        source_graph_version=g.version,
        master_seed=master,
    )


def coverage(collection: RRCollection, seeds: SeedSet) -> int:
    """Number of RR sets whose nodes intersect the seed set."""
    covered: set[int] = set()
    index = collection.inverted_index
    for v in seeds.nodes:
        if 0 <= v < len(index):
            covered.update(index[v])
    return len(covered)


def estimate_influence_rr(collection: RRCollection, seeds: SeedSet, n: int | None = None) -> float:
    """RR-based influence estimate: n * coverage / |sets|."""
    if not collection.sets:
        raise ValueError("collection is empty")
    if n is None:
        n = collection.n
    return n * coverage(collection, seeds) / len(collection.sets)


FORMAT_NAME = "rr-collection"
FORMAT_VERSION = 1


def save_collection(collection: RRCollection, dest: str | Path | IO[str]) -> None:
    """Persist a collection as a versioned JSON container (lossless)."""
    payload = {
        "format": FORMAT_NAME,
        "format_version": FORMAT_VERSION,
        "n": collection.n,
        "target_size": collection.target_size,
        "master_seed": collection.master_seed,
        "graph_version": collection.source_graph_version,
        "sets": [
            {
                "root": rr.root,
                "nodes": (nodes := sorted(rr.nodes)),
                "parents": [rr.bfs_parent.get(v, -1) for v in nodes],
            }
            for rr in collection.sets
        ],
    }
    if isinstance(dest, (str, Path)):
        with open(dest, "w") as fh:
            json.dump(payload, fh)
    else:
        json.dump(payload, dest)


def load_collection(source: str | Path | IO[str]) -> RRCollection:
    if isinstance(source, (str, Path)):
        with open(source) as fh:
            payload = json.load(fh)
    else:
        payload = json.load(source)
    if payload.get("format") != FORMAT_NAME:
        raise ValueError(f"not an {FORMAT_NAME} container")
    if payload.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported container version {payload.get('format_version')}")
    sets = []
    for entry in payload["sets"]:
        nodes = entry["nodes"]
        parents = entry["parents"]
        bfs_parent = {v: p for v, p in zip(nodes, parents) if p != -1}
        sets.append(RRSet(entry["root"], frozenset(nodes), bfs_parent))
    return RRCollection(
        sets=sets,
        target_size=payload["target_size"],
        inverted_index=build_inverted_index(sets, payload["n"]),
        n=payload["n"],
        source_graph_version=payload["graph_version"],
        master_seed=payload["master_seed"],
    )

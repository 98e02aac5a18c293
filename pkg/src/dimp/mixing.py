"""Sample reuse across weight updates: ratios, importance mixing, resampling.

The probability of generating an RR set is a product of p factors over its
BFS edges and (1-p) factors over its dead edges. Only BFS edges are stored,
so the new/old probability ratio of a set is approximated from the batch
alone: every examined edge is treated as dead, then BFS edges are corrected.
Examined edges are exactly the incoming edges of activated nodes (an
activated node examines all of its in-edges when popped), so the dead-edge
ratio of a node aggregates its changed *incoming* edges. The approximation
error is cross edges, which contributed no probability factor but are
counted as dead here; on graphs without cross edges (in-trees) the ratio is
exact.

A set whose nodes touch neither a changed edge's source nor its target has a
ratio of exactly 1.0 and is reused without being visited, which is what makes
a batch update O(affected sets).
"""

from __future__ import annotations

import random
import time
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import StaleBatchError
from .graph import Graph, UpdateBatch, changed_source_nodes
from .rr import RRCollection, RRSet, build_inverted_index, sample_rr_set
from .seeding import coerce_master_seed, spawn_seed_array, spawn_rng

DEFAULT_SMOOTHING = 1e-9

_TRIM_STREAM_LABEL = 0x7E1A
_REMAIN_STREAM_LABEL = 0x52E4


class RatioContext:
    """Per-batch lookup tables and the per-node dead-edge ratio cache."""

    __slots__ = (
        "batch",
        "smoothing",
        "changed_sources",
        "changed_targets",
        "affected_nodes",
        "changed_edge_lookup",
        "_changed_in",
        "_dead_cache",
    )

    def __init__(self, batch: UpdateBatch, smoothing: float = DEFAULT_SMOOTHING):
        if smoothing <= 0.0:
            raise ValueError("smoothing must be positive")
        self.batch = batch
        self.smoothing = smoothing
        lookup: dict[tuple[int, int], tuple[float, float]] = {}
        changed_in: dict[int, list[tuple[float, float]]] = {}
        for d in batch.deltas:
            lookup[(d.u, d.v)] = (d.old_p, d.new_p)
            changed_in.setdefault(d.v, []).append((d.old_p, d.new_p))
        self.changed_edge_lookup = lookup
        self.changed_sources = frozenset(changed_source_nodes(batch))
        self.changed_targets = frozenset(changed_in)
        self.affected_nodes = self.changed_sources | self.changed_targets
        self._changed_in = changed_in
        self._dead_cache: dict[int, float] = {}

    def dead_ratio(self, node: int) -> float:
        """New/old ratio of the probability that all of ``node``'s examined
        in-edges stay dead; 1.0 when none of them changed."""
        pairs = self._changed_in.get(node)
        if pairs is None:
            return 1.0
        cached = self._dead_cache.get(node)
        if cached is not None:
            return cached
        lam = self.smoothing
        ratio = 1.0
        for old_p, new_p in pairs:
            ratio *= (1.0 - new_p + lam) / (1.0 - old_p + lam)
        self._dead_cache[node] = ratio
        return ratio


def dead_ratio(node: int, ctx: RatioContext) -> float:
    return ctx.dead_ratio(node)


def rr_probability_ratio(rr: RRSet, ctx: RatioContext) -> float:
    """Approximate p_new(R) / p_old(R) from the set's nodes and BFS edges.

    Exactly 1.0 (no float noise) when the set touches no changed edge
    endpoint: the products below never accumulate a factor.
    """
    ratio = 1.0
    lookup = ctx.changed_edge_lookup
    changed_sources = ctx.changed_sources
    changed_targets = ctx.changed_targets
    parent = rr.bfs_parent
    lam = ctx.smoothing
    for u in rr.nodes:
        if u in changed_targets:
            ratio *= ctx.dead_ratio(u)
        if u in changed_sources:
            v = parent.get(u)
            if v is not None:
                pair = lookup.get((u, v))
                if pair is not None:
                    old_p, new_p = pair
                    # The dead factor of this edge sits in dead_ratio(v);
                    # replace it with the BFS success factor.
                    ratio *= (new_p + lam) / (old_p + lam) * ((1.0 - old_p + lam) / (1.0 - new_p + lam))
    return ratio


def remain_probability(ratio: float) -> float:
    """Probability of reusing an old set with the given probability ratio."""
    if ratio < 0.0:
        raise ValueError("ratio must be non-negative")
    return min(1.0, ratio)


def accept_probability(ratio_new: float) -> float:
    """Probability of accepting a freshly produced set with the given ratio."""
    if ratio_new <= 0.0:
        raise ValueError("ratio must be positive")
    return max(0.0, 1.0 - 1.0 / ratio_new)


def resample_rr_set(old: RRSet, g_new: Graph, ctx: RatioContext, rng: random.Random) -> RRSet:
    """Regenerate a rejected set under the new weights, replaying what it can.

    Reverse BFS from the old root with a per-edge rule: changed edges flip a
    fresh coin at the new weight; unchanged edges replay the old outcome
    (both endpoints in the old set -> success, target in the old set but
    source outside -> failure) and flip a fresh coin only where the old run
    never examined the edge (target outside the old set).
    """
    in_adj = g_new._in_adj
    if in_adj is None:
        g_new._require_weights()
    changed = ctx.changed_edge_lookup
    old_nodes = old.nodes
    rand = rng.random
    root = old.root
    nodes = {root}
    parent: dict[int, int] = {}
    queue = deque((root,))
    pop = queue.popleft
    push = queue.append
    while queue:
        v = pop()
        v_in_old = v in old_nodes
        for u, p in in_adj[v]:
            if u in nodes:
                continue
            if (u, v) in changed:
                if rand() >= p:
                    continue
            elif v_in_old:
                if u not in old_nodes:
                    continue
            elif rand() >= p:
                continue
            nodes.add(u)
            parent[u] = v
            push(u)
    return RRSet(root, frozenset(nodes), parent)


@dataclass(slots=True)
class MixStats:
    """Reuse statistics for one mix_collection call."""

    kept: int = 0
    resampled_accepted: int = 0
    fresh: int = 0
    ratio_fast_path_hits: int = 0
    wall_time_ms: float = 0.0

    @property
    def kept_fraction(self) -> float:
        total = self.kept + self.resampled_accepted + self.fresh
        return self.kept / total if total else 0.0


def mix_collection(
    old: RRCollection,
    g_new: Graph,
    batch: UpdateBatch,
    n_r: int,
    rng: int | random.Random | None,
    *,
    smoothing: float = DEFAULT_SMOOTHING,
) -> tuple[RRCollection, MixStats]:
    """Update a collection to the new snapshot by importance mixing.

    Each old set is kept with min(1, ratio); a rejected set is resampled and
    the replacement accepted with max(0, 1 - 1/ratio'). Appending stops once
    n_r sets are collected; extras would be trimmed at random (unreachable
    given the early stop, kept for defense) and any shortfall is topped up
    with fresh samples from the new snapshot. Only sets indexed under a
    changed edge endpoint are visited at all; the rest are kept untouched.

    Per-set randomness is keyed by (master seed, set index, timestep): the
    remain coin of set i is element i of one bulk-generated uniform array,
    and a rejected set's resample/accept draws come from a substream seeded
    by its index. Visit order therefore cannot perturb reproducibility, and
    only rejected sets pay for substream setup.
    """
    if n_r < 1:
        raise ValueError("collection size n_r must be >= 1")
    started = time.perf_counter()
    if batch.base_version is not None and batch.base_version != old.source_graph_version:
        raise StaleBatchError(
            f"collection was built against snapshot {old.source_graph_version}, "
            f"batch against {batch.base_version}"
        )
    for d in batch.deltas:
        if g_new.weight(d.u, d.v) != d.new_p:
            raise StaleBatchError(
                f"new snapshot does not carry the batch's weight for edge ({d.u}, {d.v})"
            )
    master = coerce_master_seed(rng)
    ctx = RatioContext(batch, smoothing)
    n_old = len(old.sets)
    stats = MixStats()

    affected = bytearray(n_old)
    index = old.inverted_index
    for v in ctx.affected_nodes:
        if 0 <= v < len(index):
            for i in index[v]:
                affected[i] = 1

    if not any(affected) and n_r == n_old:
        # Nothing to revisit and no resize: share the sets and the index.
        stats.kept = n_old
        stats.ratio_fast_path_hits = n_old
        stats.wall_time_ms = (time.perf_counter() - started) * 1000.0
        return (
            RRCollection(
                sets=old.sets,
                target_size=n_r,
                inverted_index=old.inverted_index,
                n=old.n,
                source_graph_version=g_new.version,
                master_seed=master,
            ),
            stats,
        )

    seeds = spawn_seed_array(master, n_old + n_r, batch.timestep).tolist()
    remain_seed = int(spawn_seed_array(master, 1, batch.timestep, _REMAIN_STREAM_LABEL)[0])
    remain_coins = np.random.default_rng(remain_seed).random(n_old).tolist()
    out_sets: list[RRSet] = []
    sub = random.Random()  # reseeded per rejected set; same stream as random.Random(seed)
    for i in range(n_old):
        if len(out_sets) >= n_r:
            break
        rr = old.sets[i]
        if not affected[i]:
            out_sets.append(rr)
            stats.kept += 1
            stats.ratio_fast_path_hits += 1
            continue
        if remain_coins[i] < remain_probability(rr_probability_ratio(rr, ctx)):
            out_sets.append(rr)
            stats.kept += 1
            continue
        sub.seed(seeds[i])
        candidate = resample_rr_set(rr, g_new, ctx, sub)
        if sub.random() < accept_probability(rr_probability_ratio(candidate, ctx)):
            out_sets.append(candidate)
            stats.resampled_accepted += 1

    if len(out_sets) > n_r:
        trim_rng = spawn_rng(master, batch.timestep, _TRIM_STREAM_LABEL)
        while len(out_sets) > n_r:
            out_sets.pop(trim_rng.randrange(len(out_sets)))

    j = 0
    while len(out_sets) < n_r:
        sub.seed(seeds[n_old + j])
        j += 1
        out_sets.append(sample_rr_set(g_new, sub))
        stats.fresh += 1

    mixed = RRCollection(
        sets=out_sets,
        target_size=n_r,
        inverted_index=build_inverted_index(out_sets, old.n),
        n=old.n,
        source_graph_version=g_new.version,
        master_seed=master,
    )
    stats.wall_time_ms = (time.perf_counter() - started) * 1000.0
    return mixed, stats


# -- trace machinery (test oracle; the production path never stores traces) --


@dataclass(slots=True)
class RRTrace:
    """An RR set plus the full label of every edge examined while drawing it."""

    rr: RRSet
    bfs_edges: tuple[tuple[int, int], ...]
    cross_edges: tuple[tuple[int, int], ...]
    dead_edges: tuple[tuple[int, int], ...]


def sample_rr_set_traced(g: Graph, rng: random.Random, root: int | None = None) -> RRTrace:
    """Like sample_rr_set, recording BFS/Cross/Dead labels for every examined edge."""
    in_adj = g._in_adj
    if in_adj is None:
        g._require_weights()
    if root is None:
        root = rng.randrange(g.n)
    rand = rng.random
    nodes = {root}
    parent: dict[int, int] = {}
    bfs: list[tuple[int, int]] = []
    cross: list[tuple[int, int]] = []
    dead: list[tuple[int, int]] = []
    queue = deque((root,))
    while queue:
        v = queue.popleft()
        for u, p in in_adj[v]:
            if u in nodes:
                cross.append((u, v))
            elif rand() < p:
                nodes.add(u)
                parent[u] = v
                bfs.append((u, v))
                queue.append(u)
            else:
                dead.append((u, v))
    return RRTrace(RRSet(root, frozenset(nodes), parent), tuple(bfs), tuple(cross), tuple(dead))


def exact_rr_trace_probability(g: Graph, trace: RRTrace) -> float:
    """Exact generation probability of a trace under ``g``'s weights:
    product of p over BFS edges times (1 - p) over dead edges."""
    prob = 1.0
    for u, v in trace.bfs_edges:
        prob *= g.weight(u, v)
    for u, v in trace.dead_edges:
        prob *= 1.0 - g.weight(u, v)
    return prob

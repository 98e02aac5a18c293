"""Directed weighted graphs, edge-list ingestion, and weight-update batches.

Graphs are immutable snapshots: applying an update batch returns a new
snapshot that shares untouched adjacency rows with its parent, so both the
old and new weights stay queryable while sample reuse runs.
"""

from __future__ import annotations

import csv
import hashlib
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable

from .errors import EdgeListParseError, StaleBatchError

log = logging.getLogger(__name__)

Edge = tuple[int, int]


@dataclass(frozen=True, slots=True)
class WeightDelta:
    """One edge-weight change: (u, v) moves from old_p to new_p."""

    u: int
    v: int
    old_p: float
    new_p: float
    clamped: bool = False

    def __post_init__(self):
        if not (0.0 < self.old_p <= 1.0 and 0.0 < self.new_p <= 1.0):
            raise ValueError(f"probabilities must lie in (0, 1]: {self}")
        if self.old_p == self.new_p:
            raise ValueError(f"delta must change the weight: {self}")

    def inverted(self) -> "WeightDelta":
        return WeightDelta(self.u, self.v, self.new_p, self.old_p)


@dataclass(frozen=True, slots=True)
class UpdateBatch:
    """A set of weight changes taking one snapshot to the next."""

    deltas: tuple[WeightDelta, ...]
    timestep: int = 0
    base_version: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "deltas", tuple(self.deltas))
        pairs = {(d.u, d.v) for d in self.deltas}
        if len(pairs) != len(self.deltas):
            raise ValueError("duplicate (u, v) pair within one batch")

    def __len__(self) -> int:
        return len(self.deltas)


class Graph:
    """Directed graph with dense integer node ids and per-edge probabilities.

    ``weights`` may be None for a freshly loaded topology; weight-dependent
    operations require :func:`assign_wc_weights` (or explicit weights) first.
    """

    __slots__ = (
        "n",
        "edges",
        "original_ids",
        "version",
        "self_loops_dropped",
        "_weights",
        "_in_adj",
        "_out_adj",
        "_in_ids",
        "_out_ids",
    )

    def __init__(
        self,
        n: int,
        edges: Iterable[Edge],
        weights: dict[Edge, float] | None = None,
        *,
        original_ids: list[int] | None = None,
        version: str | None = None,
        self_loops_dropped: int = 0,
    ):
        edges = tuple(edges)
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) outside node range [0, {n})")
            if u == v:
                raise ValueError(f"self-loop ({u}, {v}) not allowed")
        if len(set(edges)) != len(edges):
            raise ValueError("duplicate edges not allowed")
        self.n = n
        self.edges = edges
        self.original_ids = original_ids
        self.self_loops_dropped = self_loops_dropped
        self._weights = None
        self._in_adj = None
        self._out_adj = None
        self._in_ids = None
        self._out_ids = None
        if weights is not None:
            self._set_weights(dict(weights))
        else:
            in_ids = [[] for _ in range(n)]
            out_ids = [[] for _ in range(n)]
            for u, v in edges:
                out_ids[u].append(v)
                in_ids[v].append(u)
            self._in_ids = in_ids
            self._out_ids = out_ids
        self.version = version if version is not None else self._content_version()

    def _set_weights(self, weights: dict[Edge, float]) -> None:
        if set(weights) != set(self.edges):
            raise ValueError("weights must cover exactly the edge set")
        for e, p in weights.items():
            if not (0.0 < p <= 1.0):
                raise ValueError(f"weight p{e}={p} outside (0, 1]")
        in_adj = [[] for _ in range(self.n)]
        out_adj = [[] for _ in range(self.n)]
        for u, v in self.edges:
            p = weights[(u, v)]
            out_adj[u].append((v, p))
            in_adj[v].append((u, p))
        self._weights = weights
        self._in_adj = [tuple(row) for row in in_adj]
        self._out_adj = [tuple(row) for row in out_adj]

    @classmethod
    def _from_parts(cls, base: "Graph", weights, in_adj, out_adj, version: str) -> "Graph":
        # Snapshot constructor: shares untouched adjacency rows with ``base``.
        g = object.__new__(cls)
        g.n = base.n
        g.edges = base.edges
        g.original_ids = base.original_ids
        g.self_loops_dropped = base.self_loops_dropped
        g._weights = weights
        g._in_adj = in_adj
        g._out_adj = out_adj
        g._in_ids = None
        g._out_ids = None
        g.version = version
        return g

    def _content_version(self) -> str:
        h = hashlib.blake2b(digest_size=8)
        h.update(f"n={self.n}".encode())
        for u, v in self.edges:
            h.update(f"{u},{v};".encode())
        if self._weights is None:
            h.update(b"unweighted")
        else:
            for u, v in self.edges:
                h.update(repr(self._weights[(u, v)]).encode())
        return h.hexdigest()

    # -- queries ------------------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def is_weighted(self) -> bool:
        return self._weights is not None

    def _require_weights(self):
        if self._weights is None:
            raise ValueError("graph has no weights assigned yet")

    def weight(self, u: int, v: int) -> float:
        self._require_weights()
        try:
            return self._weights[(u, v)]
        except KeyError:
            raise ValueError(f"no edge ({u}, {v})") from None

    def has_edge(self, u: int, v: int) -> bool:
        if self._weights is not None:
            return (u, v) in self._weights
        return v in self._out_ids[u]

    def in_neighbors(self, v: int) -> tuple[tuple[int, float], ...]:
        """(source, p) pairs for all edges into ``v``."""
        self._require_weights()
        return self._in_adj[v]

    def out_neighbors(self, u: int) -> tuple[tuple[int, float], ...]:
        """(target, p) pairs for all edges out of ``u``."""
        self._require_weights()
        return self._out_adj[u]

    def in_degree(self, v: int) -> int:
        return len(self._in_adj[v]) if self._in_adj is not None else len(self._in_ids[v])

    def out_degree(self, u: int) -> int:
        return len(self._out_adj[u]) if self._out_adj is not None else len(self._out_ids[u])

    def __repr__(self) -> str:
        kind = "weighted" if self.is_weighted else "unweighted"
        return f"Graph(n={self.n}, m={self.m}, {kind}, version={self.version!r})"


def load_edge_list(source: str | Path | IO[bytes] | IO[str]) -> Graph:
    """Parse a SNAP-style edge list into an unweighted Graph.

    Lines hold whitespace-separated "u v" integer pairs; '#' lines are
    comments. Node ids are remapped to dense [0, n) in first-appearance order
    (the original ids are kept on ``Graph.original_ids``). Duplicate edge
    lines collapse to one edge; self-loops are dropped and counted.
    """
    fh: IO
    close = False
    if isinstance(source, (str, Path)):
        fh = open(source, "rb")
        close = True
    else:
        fh = source
    try:
        id_map: dict[int, int] = {}
        edges: list[Edge] = []
        seen: set[Edge] = set()
        dropped = 0
        for lineno, raw in enumerate(fh, start=1):
            if isinstance(raw, bytes):
                try:
                    line = raw.decode("utf-8")
                except UnicodeDecodeError:
                    raise EdgeListParseError(lineno, "not valid UTF-8") from None
            else:
                line = raw
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise EdgeListParseError(lineno, f"expected 'u v', got {line!r}")
            try:
                u_raw, v_raw = int(parts[0]), int(parts[1])
            except ValueError:
                raise EdgeListParseError(lineno, f"non-integer node id in {line!r}") from None
            if u_raw == v_raw:
                dropped += 1
                continue
            if (u_raw, v_raw) in seen:
                continue
            seen.add((u_raw, v_raw))
            u = id_map.setdefault(u_raw, len(id_map))
            v = id_map.setdefault(v_raw, len(id_map))
            edges.append((u, v))
    finally:
        if close:
            fh.close()
    if dropped:
        log.warning("dropped %d self-loop line(s) while loading edge list", dropped)
    return Graph(
        len(id_map),
        edges,
        original_ids=list(id_map),
        self_loops_dropped=dropped,
    )


def assign_wc_weights(g: Graph) -> Graph:
    """Weighted-cascade weights: every edge (u, v) gets p = 1 / in_degree(v)."""
    if g.m == 0:
        raise ValueError("graph has no edges")
    weights = {(u, v): 1.0 / g.in_degree(v) for u, v in g.edges}
    return Graph(
        g.n,
        g.edges,
        weights,
        original_ids=g.original_ids,
        self_loops_dropped=g.self_loops_dropped,
    )


def generate_random_updates(
    g: Graph,
    count: int,
    rng: random.Random,
    *,
    timestep: int = 0,
) -> UpdateBatch:
    """Pick ``count`` distinct edges uniformly and double or halve each weight.

    Doubling past 1.0 clamps to 1.0 (flagged on the delta). An edge already at
    1.0 cannot double to anything new, so the doubling branch falls back to
    halving there to keep every delta a real change.
    """
    g._require_weights()
    if count > g.m:
        raise ValueError(f"count {count} exceeds edge count {g.m}")
    deltas = []
    for idx in rng.sample(range(g.m), count):
        u, v = g.edges[idx]
        old_p = g.weight(u, v)
        double = rng.random() < 0.5
        if double and old_p < 1.0:
            new_p = old_p * 2.0
            clamped = new_p > 1.0
            if clamped:
                new_p = 1.0
        else:
            new_p = old_p / 2.0
            clamped = False
        deltas.append(WeightDelta(u, v, old_p, new_p, clamped))
    return UpdateBatch(tuple(deltas), timestep=timestep, base_version=g.version)


def apply_update_batch(g: Graph, batch: UpdateBatch) -> Graph:
    """Return the next snapshot with the batch's new weights applied.

    The input snapshot is untouched and remains queryable; unchanged
    adjacency rows are shared between the two snapshots.
    """
    g._require_weights()
    if not batch.deltas:
        return g
    if batch.base_version is not None and batch.base_version != g.version:
        raise StaleBatchError(
            f"batch was generated against snapshot {batch.base_version}, "
            f"but this graph is {g.version}"
        )
    new_weights = dict(g._weights)
    for d in batch.deltas:
        cur = g._weights.get((d.u, d.v))
        if cur is None:
            raise StaleBatchError(f"batch updates missing edge ({d.u}, {d.v})")
        if cur != d.old_p:
            raise StaleBatchError(
                f"stale old_p for edge ({d.u}, {d.v}): batch says {d.old_p!r}, "
                f"graph has {cur!r}"
            )
        new_weights[(d.u, d.v)] = d.new_p
    in_adj = list(g._in_adj)
    out_adj = list(g._out_adj)
    for u in {d.u for d in batch.deltas}:
        out_adj[u] = tuple((v, new_weights[(u, v)]) for v, _ in g._out_adj[u])
    for v in {d.v for d in batch.deltas}:
        in_adj[v] = tuple((u, new_weights[(u, v)]) for u, _ in g._in_adj[v])
    version = f"{g.version}+{_batch_digest(batch)}"
    return Graph._from_parts(g, new_weights, in_adj, out_adj, version)


def changed_source_nodes(batch: UpdateBatch) -> set[int]:
    """Source endpoints {u : (u, v) in batch}."""
    return {d.u for d in batch.deltas}


def _batch_digest(batch: UpdateBatch) -> str:
    h = hashlib.blake2b(digest_size=6)
    for d in sorted(batch.deltas, key=lambda d: (d.u, d.v)):
        h.update(f"{d.u},{d.v},{d.old_p!r},{d.new_p!r};".encode())
    return h.hexdigest()


UPDATE_CSV_HEADER = ["u", "v", "old_p", "new_p"]


def write_update_batch_csv(batch: UpdateBatch, dest: str | Path | IO[str]) -> None:
    """Write a batch as CSV with header ``u,v,old_p,new_p``."""
    fh: IO[str]
    close = False
    if isinstance(dest, (str, Path)):
        fh = open(dest, "w", newline="")
        close = True
    else:
        fh = dest
    try:
        writer = csv.writer(fh)
        writer.writerow(UPDATE_CSV_HEADER)
        for d in batch.deltas:
            writer.writerow([d.u, d.v, repr(d.old_p), repr(d.new_p)])
    finally:
        if close:
            fh.close()


def read_update_batch_csv(source: str | Path | IO[str], *, timestep: int = 0) -> UpdateBatch:
    fh: IO[str]
    close = False
    if isinstance(source, (str, Path)):
        fh = open(source, "r", newline="")
        close = True
    else:
        fh = source
    try:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != UPDATE_CSV_HEADER:
            raise ValueError(f"unexpected update CSV header: {header}")
        deltas = [
            WeightDelta(int(row[0]), int(row[1]), float(row[2]), float(row[3]))
            for row in reader
            if row
        ]
    finally:
        if close:
            fh.close()
    return UpdateBatch(tuple(deltas), timestep=timestep)

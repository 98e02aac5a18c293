"""Benchmark harness: multi-timestep static vs dynamic runs with CSV output.

Each update count is a two-snapshot experiment: the base graph, then the
graph after one batch of weight updates. The static pipeline rebuilds its
collection from scratch on the updated snapshot; the dynamic pipeline mixes
the timestep-0 collection forward. Reported wall times cover collection
build/mix plus selection only; graph loading and update application are
excluded.
"""

from __future__ import annotations

import dataclasses
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO

from . import _fastmc
from .diffusion import SeedSet, estimate_influence_mc_parallel
from .graph import (
    Graph,
    UpdateBatch,
    apply_update_batch,
    assign_wc_weights,
    generate_random_updates,
    load_edge_list,
    write_update_batch_csv,
)
from .mixing import MixStats, mix_collection
from .rr import build_collection, save_collection
from .seeding import spawn_rng, spawn_seed_array
from .selection import SampleSizePolicy, decide_sample_size, greedy_select
from .synth import generate_synthetic_graph

# Stream labels keep the independent random streams of one run apart.
_L_BATCH = 1
_L_BUILD_STATIC = 2
_L_BUILD_DYNAMIC = 3
_L_MIX = 4
_L_MC = 5
_L_POLICY = 6

STATIC = "static"
DYNAMIC = "dynamic-reuse"


@dataclass
class ExperimentConfig:
    """Flat experiment configuration; JSON files use exactly these keys."""

    graph_path: str | None = None
    weight_model: str = "wc"
    k: int = 50
    epsilon: float = 0.1
    ell: int = 1
    r_mc: int = 10_000
    repeats: int = 10
    update_counts: list[int] = field(default_factory=lambda: [1000])
    master_seed: int = 0
    smoothing: float = 1e-9
    policy_mode: str = "fixed"
    policy_fixed_n: int = 10_000
    policy_stability_threshold: float = 0.01
    policy_c0: float = 1.0
    output_dir: str = "out"
    synth_nodes: int = 2000
    synth_mean_in_degree: int = 10
    synth_seed: int = 0
    synth_uniform_mix: float = 0.5
    synth_sink_fraction: float = 0.0
    evaluate_timestep0: bool = True
    save_collections: bool = False
    mc_engine: str = "auto"
    mc_workers: int = 1

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.r_mc < 1:
            raise ValueError("r_mc must be >= 1")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if self.weight_model != "wc":
            raise ValueError(f"unsupported weight model {self.weight_model!r}")
        if any(c < 0 for c in self.update_counts):
            raise ValueError("update counts must be non-negative")
        if self.mc_engine not in ("auto", "python", "numba"):
            raise ValueError(f"unknown mc_engine {self.mc_engine!r}")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentConfig":
        with open(path) as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError("config file must hold a JSON object")
        return cls.from_dict(data)

    def policy(self) -> SampleSizePolicy:
        return SampleSizePolicy(
            mode=self.policy_mode,
            fixed_n=self.policy_fixed_n,
            epsilon=self.epsilon,
            ell=self.ell,
            stability_threshold=self.policy_stability_threshold,
            c0=self.policy_c0,
        )


@dataclass(slots=True)
class RunRecord:
    """One pipeline execution on one snapshot."""

    algorithm: str
    repeat: int
    timestep: int
    update_count: int
    n_r: int
    wall_time_ms: float
    influence_mc_mean: float | None
    influence_mc_stderr: float | None
    kept: int | None
    resampled_accepted: int | None
    fresh: int | None
    ratio_fast_path_hits: int | None
    seeds: list[int]


RUNS_CSV_COLUMNS = [
    "algorithm",
    "repeat",
    "timestep",
    "update_count",
    "n_r",
    "wall_time_ms",
    "influence_mc_mean",
    "influence_mc_stderr",
    "kept",
    "resampled_accepted",
    "fresh",
    "ratio_fast_path_hits",
    "seeds",
]

TIMING_COLUMNS = ["wall_time_ms"]


def prepare_graph(cfg: ExperimentConfig) -> Graph:
    """Load (or synthesize) the topology and assign weights."""
    if cfg.graph_path is not None:
        g = load_edge_list(cfg.graph_path)
    else:
        g = generate_synthetic_graph(
            cfg.synth_nodes,
            cfg.synth_mean_in_degree,
            cfg.synth_seed,
            uniform_mix=cfg.synth_uniform_mix,
            sink_fraction=cfg.synth_sink_fraction,
        )
    return assign_wc_weights(g)


def batch_for(cfg: ExperimentConfig, g0: Graph, repeat: int, count: int) -> UpdateBatch:
    """The update batch for one (repeat, count) cell; shared by both pipelines."""
    return generate_random_updates(
        g0, count, spawn_rng(cfg.master_seed, _L_BATCH, repeat, count), timestep=1
    )


def _evaluate(cfg: ExperimentConfig, g: Graph, seeds: list[int], repeat: int, count: int):
    seed_set = SeedSet(frozenset(seeds), max(cfg.k, len(seeds)))
    master = int(spawn_seed_array(cfg.master_seed, 1, _L_MC, repeat, count)[0])
    engine = cfg.mc_engine
    if engine == "auto":
        engine = "numba" if _fastmc.HAVE_NUMBA else "python"
    if engine == "numba":
        return _fastmc.estimate_influence_mc_fast(g, seed_set, cfg.r_mc, master)
    return estimate_influence_mc_parallel(g, seed_set, cfg.r_mc, master, cfg.mc_workers)


def _record(
    algorithm: str,
    repeat: int,
    timestep: int,
    count: int,
    n_r: int,
    wall_ms: float,
    estimate,
    selection,
    stats: MixStats | None = None,
) -> RunRecord:
    return RunRecord(
        algorithm=algorithm,
        repeat=repeat,
        timestep=timestep,
        update_count=count,
        n_r=n_r,
        wall_time_ms=wall_ms,
        influence_mc_mean=None if estimate is None else estimate.mean,
        influence_mc_stderr=None if estimate is None else estimate.stderr,
        kept=None if stats is None else stats.kept,
        resampled_accepted=None if stats is None else stats.resampled_accepted,
        fresh=None if stats is None else stats.fresh,
        ratio_fast_path_hits=None if stats is None else stats.ratio_fast_path_hits,
        seeds=list(selection.seeds),
    )


def _save(cfg: ExperimentConfig, collection, tag: str) -> None:
    if cfg.save_collections:
        out = Path(cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        save_collection(collection, out / f"collection_{tag}.json")


def run_static(cfg: ExperimentConfig, graph: Graph | None = None) -> list[RunRecord]:
    """Rebuild from scratch on every snapshot (the static baseline)."""
    g0 = graph if graph is not None else prepare_graph(cfg)
    policy = cfg.policy()
    records = []
    for rep in range(cfg.repeats):
        n_r = decide_sample_size(g0, cfg.k, policy, spawn_rng(cfg.master_seed, _L_POLICY, rep))
        started = time.perf_counter()
        coll = build_collection(g0, n_r, spawn_rng(cfg.master_seed, _L_BUILD_STATIC, rep, 0))
        sel = greedy_select(coll, cfg.k)
        wall = (time.perf_counter() - started) * 1000.0
        est = _evaluate(cfg, g0, sel.seeds, rep, 0) if cfg.evaluate_timestep0 else None
        records.append(_record(STATIC, rep, 0, 0, n_r, wall, est, sel))
        _save(cfg, coll, f"{STATIC}_rep{rep}_t0")
        for count in cfg.update_counts:
            batch = batch_for(cfg, g0, rep, count)
            g1 = apply_update_batch(g0, batch)
            started = time.perf_counter()
            coll = build_collection(g1, n_r, spawn_rng(cfg.master_seed, _L_BUILD_STATIC, rep, count))
            sel = greedy_select(coll, cfg.k)
            wall = (time.perf_counter() - started) * 1000.0
            est = _evaluate(cfg, g1, sel.seeds, rep, count)
            records.append(_record(STATIC, rep, 1, count, n_r, wall, est, sel))
            _save(cfg, coll, f"{STATIC}_rep{rep}_u{count}")
    return records


def run_dynamic(cfg: ExperimentConfig, graph: Graph | None = None) -> list[RunRecord]:
    """Build once at timestep 0, then mix the collection through each batch."""
    g0 = graph if graph is not None else prepare_graph(cfg)
    policy = cfg.policy()
    records = []
    for rep in range(cfg.repeats):
        n_r = decide_sample_size(g0, cfg.k, policy, spawn_rng(cfg.master_seed, _L_POLICY, rep))
        started = time.perf_counter()
        coll0 = build_collection(g0, n_r, spawn_rng(cfg.master_seed, _L_BUILD_DYNAMIC, rep, 0))
        sel0 = greedy_select(coll0, cfg.k)
        wall = (time.perf_counter() - started) * 1000.0
        est = _evaluate(cfg, g0, sel0.seeds, rep, 0) if cfg.evaluate_timestep0 else None
        records.append(_record(DYNAMIC, rep, 0, 0, n_r, wall, est, sel0))
        _save(cfg, coll0, f"{DYNAMIC}_rep{rep}_t0")
        for count in cfg.update_counts:
            batch = batch_for(cfg, g0, rep, count)
            g1 = apply_update_batch(g0, batch)
            started = time.perf_counter()
            mixed, stats = mix_collection(
                coll0,
                g1,
                batch,
                n_r,
                spawn_rng(cfg.master_seed, _L_MIX, rep, count),
                smoothing=cfg.smoothing,
            )
            sel = greedy_select(mixed, cfg.k)
            wall = (time.perf_counter() - started) * 1000.0
            est = _evaluate(cfg, g1, sel.seeds, rep, count)
            records.append(_record(DYNAMIC, rep, 1, count, n_r, wall, est, sel, stats))
            _save(cfg, mixed, f"{DYNAMIC}_rep{rep}_u{count}")
    return records


def write_runs_csv(records: list[RunRecord], dest: str | Path | IO[str]) -> None:
    import csv

    fh: IO[str]
    close = False
    if isinstance(dest, (str, Path)):
        fh = open(dest, "w", newline="")
        close = True
    else:
        fh = dest
    try:
        writer = csv.writer(fh)
        writer.writerow(RUNS_CSV_COLUMNS)
        for rec in records:
            row = []
            for col in RUNS_CSV_COLUMNS:
                value = getattr(rec, col)
                if value is None:
                    row.append("")
                elif col == "seeds":
                    row.append(" ".join(str(s) for s in value))
                elif isinstance(value, float):
                    row.append(repr(value))
                else:
                    row.append(value)
            writer.writerow(row)
    finally:
        if close:
            fh.close()


def write_config_sidecar(cfg: ExperimentConfig, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(dataclasses.asdict(cfg), fh, indent=2, sort_keys=True)
        fh.write("\n")


def gen_update_files(cfg: ExperimentConfig, graph: Graph | None = None) -> list[Path]:
    """Write one deterministic updates_<count>.csv per configured count."""
    g0 = graph if graph is not None else prepare_graph(cfg)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for count in cfg.update_counts:
        batch = batch_for(cfg, g0, 0, count)
        path = out / f"updates_{count}.csv"
        write_update_batch_csv(batch, path)
        paths.append(path)
    return paths


def read_seed_file(path: str | Path, n: int) -> list[int]:
    """Whitespace-separated node ids; every id must exist in the graph."""
    text = Path(path).read_text()
    tokens = text.split()
    if not tokens:
        raise ValueError(f"seed file {path} is empty")
    seeds = []
    for tok in tokens:
        try:
            node = int(tok)
        except ValueError:
            raise ValueError(f"seed file {path}: {tok!r} is not a node id") from None
        if not (0 <= node < n):
            raise ValueError(f"seed file {path}: unknown node id {node}")
        seeds.append(node)
    return seeds

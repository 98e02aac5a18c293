"""Command-line harness: dimp run-static | run-dynamic | gen-updates | evaluate | gen-graph."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .diffusion import SeedSet, estimate_influence_mc
from .errors import DimpError
from .experiment import (
    ExperimentConfig,
    gen_update_files,
    prepare_graph,
    read_seed_file,
    run_dynamic,
    run_static,
    write_config_sidecar,
    write_runs_csv,
)
from .seeding import spawn_rng
from .synth import generate_synthetic_graph

EXIT_CONFIG = 2
EXIT_IO = 3

log = logging.getLogger(__name__)


def _add_config_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON config file (flat keys)")
    p.add_argument("--graph", help="edge-list path override")
    p.add_argument("--k", type=int, help="seed budget override")
    p.add_argument("--seed", type=int, help="master seed override")
    p.add_argument("--updates", help="comma-separated update counts override")
    p.add_argument("--repeats", type=int, help="repeat count override")
    p.add_argument("--r-mc", type=int, help="Monte Carlo simulation count override")
    p.add_argument("--n-r", type=int, help="fixed collection size override")
    p.add_argument("--out", help="output directory override")
    p.add_argument("--save-collections", action="store_true", help="persist RR collections")


def _resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig.from_json(args.config) if args.config else ExperimentConfig()
    if args.graph is not None:
        cfg.graph_path = args.graph
    if args.k is not None:
        cfg.k = args.k
    if args.seed is not None:
        cfg.master_seed = args.seed
    if args.updates is not None:
        cfg.update_counts = [int(tok) for tok in args.updates.split(",") if tok]
    if args.repeats is not None:
        cfg.repeats = args.repeats
    if args.r_mc is not None:
        cfg.r_mc = args.r_mc
    if args.n_r is not None:
        cfg.policy_mode = "fixed"
        cfg.policy_fixed_n = args.n_r
    if args.out is not None:
        cfg.output_dir = args.out
    if args.save_collections:
        cfg.save_collections = True
    return cfg


def _cmd_run(args: argparse.Namespace, runner) -> int:
    cfg = _resolve_config(args)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    graph = prepare_graph(cfg)
    records = runner(cfg, graph)
    write_runs_csv(records, out / "runs.csv")
    write_config_sidecar(cfg, out / "config.json")
    log.info("wrote %d records to %s", len(records), out / "runs.csv")
    return 0


def _cmd_gen_updates(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    paths = gen_update_files(cfg)
    for path in paths:
        log.info("wrote %s", path)
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = ExperimentConfig(graph_path=args.graph, r_mc=args.r, master_seed=args.seed)
    graph = prepare_graph(cfg)
    seeds = read_seed_file(args.seeds, graph.n)
    seed_set = SeedSet(frozenset(seeds), len(seeds))
    est = estimate_influence_mc(graph, seed_set, args.r, spawn_rng(args.seed, 0))
    print(f"influence_mean={est.mean!r} influence_stderr={est.stderr!r} r={est.r}")
    return 0


def _cmd_gen_graph(args: argparse.Namespace) -> int:
    g = generate_synthetic_graph(
        args.nodes,
        args.mean_in_degree,
        args.seed,
        uniform_mix=args.uniform_mix,
        sink_fraction=args.sink_fraction,
    )
    with open(args.out, "w") as fh:
        fh.write(f"# synthetic preferential-attachment graph n={g.n} m={g.m}\n")
        for u, v in g.edges:
            fh.write(f"{u}\t{v}\n")
    log.info("wrote %s (n=%d, m=%d)", args.out, g.n, g.m)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dimp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run-static", help="rebuild the collection on every snapshot")
    _add_config_flags(p)
    p.set_defaults(func=lambda a: _cmd_run(a, run_static))

    p = sub.add_parser("run-dynamic", help="reuse the collection across snapshots")
    _add_config_flags(p)
    p.set_defaults(func=lambda a: _cmd_run(a, run_dynamic))

    p = sub.add_parser("gen-updates", help="write deterministic update batches as CSV")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_gen_updates)

    p = sub.add_parser("evaluate", help="Monte Carlo influence of a seed file")
    p.add_argument("--graph", required=True)
    p.add_argument("--seeds", required=True, help="file of whitespace-separated node ids")
    p.add_argument("--r", type=int, default=10_000, help="simulation count (default 10000)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("gen-graph", help="write a synthetic benchmark graph")
    p.add_argument("--out", required=True)
    p.add_argument("--nodes", type=int, default=31_000)
    p.add_argument("--mean-in-degree", type=int, default=10)
    p.add_argument("--uniform-mix", type=float, default=0.5, help="uniform share in source picks")
    p.add_argument("--sink-fraction", type=float, default=0.0, help="share of nodes with no in-edges")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_gen_graph)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"dimp: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DimpError, ValueError, TypeError) as exc:
        print(f"dimp: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()

import csv
import io
import json

import pytest

from dimp import load_edge_list
from dimp.cli import EXIT_CONFIG, EXIT_IO, main


def write_config(tmp_path, **overrides):
    cfg = {
        "synth_nodes": 250,
        "synth_mean_in_degree": 4,
        "k": 3,
        "r_mc": 200,
        "repeats": 1,
        "update_counts": [5],
        "master_seed": 5,
        "policy_mode": "fixed",
        "policy_fixed_n": 1500,
        "mc_engine": "python",
    }
    cfg.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return path


def strip_timing(csv_text: str) -> str:
    rows = list(csv.reader(io.StringIO(csv_text)))
    drop = rows[0].index("wall_time_ms")
    kept = [[c for i, c in enumerate(r) if i != drop] for r in rows]
    out = io.StringIO()
    csv.writer(out).writerows(kept)
    return out.getvalue()


class TestGenGraph:
    def test_writes_loadable_edge_list(self, tmp_path):
        out = tmp_path / "graph.txt"
        assert main(["gen-graph", "--out", str(out), "--nodes", "300", "--seed", "4"]) == 0
        g = load_edge_list(out)
        assert g.n <= 300
        assert g.m > 0


class TestGenUpdates:
    def test_deterministic_files(self, tmp_path):
        cfg = write_config(tmp_path, update_counts=[4])
        out1, out2 = tmp_path / "u1", tmp_path / "u2"
        assert main(["gen-updates", "--config", str(cfg), "--out", str(out1)]) == 0
        assert main(["gen-updates", "--config", str(cfg), "--out", str(out2)]) == 0
        f1 = (out1 / "updates_4.csv").read_bytes()
        f2 = (out2 / "updates_4.csv").read_bytes()
        assert f1 == f2
        assert len(f1.splitlines()) == 5

    def test_count_beyond_edges_is_config_error(self, tmp_path):
        cfg = write_config(tmp_path, synth_nodes=10, synth_mean_in_degree=2, update_counts=[100000])
        assert main(["gen-updates", "--config", str(cfg), "--out", str(tmp_path / "u")]) == EXIT_CONFIG


class TestRunCommands:
    def test_run_static_writes_outputs(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "static"
        assert main(["run-static", "--config", str(cfg), "--out", str(out)]) == 0
        rows = list(csv.reader(io.StringIO((out / "runs.csv").read_text())))
        assert rows[0][0] == "algorithm"
        assert len(rows) == 3  # header + t0 + one count
        sidecar = json.loads((out / "config.json").read_text())
        assert sidecar["k"] == 3

    def test_run_dynamic_reproducible_modulo_timing(self, tmp_path):
        cfg = write_config(tmp_path, repeats=2, update_counts=[0, 5])
        out1, out2 = tmp_path / "d1", tmp_path / "d2"
        assert main(["run-dynamic", "--config", str(cfg), "--out", str(out1)]) == 0
        assert main(["run-dynamic", "--config", str(cfg), "--out", str(out2)]) == 0
        a = strip_timing((out1 / "runs.csv").read_text())
        b = strip_timing((out2 / "runs.csv").read_text())
        assert a == b

    def test_flag_overrides(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "o"
        assert main(["run-dynamic", "--config", str(cfg), "--out", str(out), "--k", "2", "--n-r", "900"]) == 0
        sidecar = json.loads((out / "config.json").read_text())
        assert sidecar["k"] == 2
        assert sidecar["policy_fixed_n"] == 900

    def test_missing_graph_file_is_io_error(self, tmp_path):
        cfg = write_config(tmp_path, graph_path=str(tmp_path / "no_such_file.txt"))
        assert main(["run-static", "--config", str(cfg), "--out", str(tmp_path / "x")]) == EXIT_IO

    def test_unknown_config_key_is_config_error(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"k": 3, "bogus": True}))
        assert main(["run-static", "--config", str(path), "--out", str(tmp_path / "x")]) == EXIT_CONFIG

    def test_save_collections(self, tmp_path):
        cfg = write_config(tmp_path, repeats=1, update_counts=[2], policy_fixed_n=400)
        out = tmp_path / "with_colls"
        assert main(["run-dynamic", "--config", str(cfg), "--out", str(out), "--save-collections"]) == 0
        saved = sorted(p.name for p in out.glob("collection_*.json"))
        assert saved == ["collection_dynamic-reuse_rep0_t0.json", "collection_dynamic-reuse_rep0_u2.json"]


class TestEvaluate:
    @pytest.fixture()
    def fork_file(self, tmp_path):
        path = tmp_path / "fork.txt"
        path.write_text("0 2\n1 2\n")
        return path

    def test_default_simulation_count(self):
        from dimp.cli import build_parser

        args = build_parser().parse_args(["evaluate", "--graph", "g", "--seeds", "s"])
        assert args.r == 10_000

    def test_all_nodes_gives_n_with_zero_stderr(self, tmp_path, fork_file, capsys):
        seeds = tmp_path / "seeds.txt"
        seeds.write_text("0 1 2\n")
        assert main(["evaluate", "--graph", str(fork_file), "--seeds", str(seeds), "--r", "50"]) == 0
        out = capsys.readouterr().out
        assert "influence_mean=3.0" in out
        assert "influence_stderr=0.0" in out
        assert "r=50" in out

    def test_unknown_seed_node(self, tmp_path, fork_file):
        seeds = tmp_path / "seeds.txt"
        seeds.write_text("7\n")
        assert main(["evaluate", "--graph", str(fork_file), "--seeds", str(seeds)]) == EXIT_CONFIG

    def test_empty_seed_file(self, tmp_path, fork_file):
        seeds = tmp_path / "seeds.txt"
        seeds.write_text("")
        assert main(["evaluate", "--graph", str(fork_file), "--seeds", str(seeds)]) == EXIT_CONFIG

    def test_missing_seed_file_is_io_error(self, tmp_path, fork_file):
        assert main(["evaluate", "--graph", str(fork_file), "--seeds", str(tmp_path / "nope")]) == EXIT_IO


class TestSynthGraph:
    def test_meets_scale_floors_when_asked(self):
        from dimp import generate_synthetic_graph

        g = generate_synthetic_graph(2_000, 10, seed=1)
        assert g.n == 2_000
        assert g.m >= 10 * (2_000 - 10) * 0.8

    def test_deterministic(self):
        from dimp import generate_synthetic_graph

        a = generate_synthetic_graph(500, 5, seed=9)
        b = generate_synthetic_graph(500, 5, seed=9)
        assert a.edges == b.edges

    def test_sink_fraction_creates_sources(self):
        from dimp import generate_synthetic_graph

        g = generate_synthetic_graph(2_000, 8, seed=2, sink_fraction=0.4)
        in_zero = sum(1 for v in range(g.n) if g.in_degree(v) == 0)
        assert in_zero / g.n > 0.3

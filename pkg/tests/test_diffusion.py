import math
import random

import pytest

from dimp import (
    CapacityError,
    Graph,
    SeedSet,
    estimate_influence_mc,
    exact_influence_bruteforce,
    exact_rr_distribution,
    simulate_ic_once,
)
from dimp.diffusion import estimate_influence_mc_parallel
from helpers import fork_graph, random_weighted_graph, wgraph


class TestSimulateOnce:
    def test_all_nodes_seeded_returns_n(self):
        g = wgraph(4, [(0, 1, 0.5), (1, 2, 0.5), (2, 3, 0.5)])
        s = SeedSet(frozenset(range(4)), 4)
        assert simulate_ic_once(g, s, random.Random(0)) == 4

    def test_isolated_seed_returns_one(self):
        g = wgraph(3, [(1, 2, 0.9)])
        assert simulate_ic_once(g, SeedSet.of(0), random.Random(0)) == 1

    def test_deterministic_edge_always_fires(self):
        g = wgraph(2, [(0, 1, 1.0)])
        assert all(simulate_ic_once(g, SeedSet.of(0), random.Random(s)) == 2 for s in range(50))

    def test_empty_seed_set_rejected(self):
        g = wgraph(2, [(0, 1, 0.5)])
        with pytest.raises(ValueError):
            simulate_ic_once(g, SeedSet(frozenset(), 0), random.Random(0))


class TestEstimateMc:
    def test_constant_outcome_has_zero_stderr(self):
        g = wgraph(3, [(0, 1, 0.5), (1, 2, 0.5)])
        est = estimate_influence_mc(g, SeedSet(frozenset(range(3)), 3), 200, random.Random(1))
        assert est.mean == 3.0
        assert est.stderr == 0.0
        assert est.r == 200

    def test_chain_converges_to_expectation(self):
        # exact expectation 1 + 0.5
        g = wgraph(2, [(0, 1, 0.5)])
        est = estimate_influence_mc(g, SeedSet.of(0), 20_000, random.Random(2))
        assert abs(est.mean - 1.5) <= 4 * est.stderr

    def test_two_seed_fork(self):
        # 2 + P(join active) = 2 + (1 - 0.25)
        g = fork_graph()
        est = estimate_influence_mc(g, SeedSet.of(0, 1), 20_000, random.Random(3))
        assert abs(est.mean - 2.75) <= 4 * est.stderr

    def test_parallel_matches_contract(self):
        g = fork_graph()
        est = estimate_influence_mc_parallel(g, SeedSet.of(0, 1), 20_000, 77, 2)
        assert abs(est.mean - 2.75) <= 4 * est.stderr
        again = estimate_influence_mc_parallel(g, SeedSet.of(0, 1), 20_000, 77, 2)
        assert again == est


class TestBruteForce:
    def test_chain(self):
        g = wgraph(2, [(0, 1, 0.5)])
        assert math.isclose(exact_influence_bruteforce(g, SeedSet.of(0)), 1.5)

    def test_all_seeds_reach_everything(self):
        g = wgraph(4, [(0, 1, 0.2), (2, 3, 0.7)])
        assert exact_influence_bruteforce(g, SeedSet(frozenset(range(4)), 4)) == 4.0

    def test_fork_single_seed(self):
        assert math.isclose(exact_influence_bruteforce(fork_graph(), SeedSet.of(0)), 1.5)

    def test_capacity_error(self):
        edges = [(u, v) for u in range(6) for v in range(6) if u != v][:26]
        g = Graph(6, edges, {e: 0.5 for e in edges})
        with pytest.raises(CapacityError):
            exact_influence_bruteforce(g, SeedSet.of(0))

    def test_matches_mc_within_four_sigma(self):
        rng = random.Random(12)
        for _ in range(15):
            g = random_weighted_graph(rng, max_nodes=5, max_edges=8)
            seeds = SeedSet.of(rng.randrange(g.n))
            exact = exact_influence_bruteforce(g, seeds)
            est = estimate_influence_mc(g, seeds, 4000, random.Random(rng.getrandbits(32)))
            assert abs(est.mean - exact) <= 4 * est.stderr + 1e-9


class TestExactRrDistribution:
    def test_fork_root(self):
        dist = exact_rr_distribution(fork_graph(), 2)
        assert dist == {
            frozenset({2}): pytest.approx(0.25),
            frozenset({0, 2}): pytest.approx(0.25),
            frozenset({1, 2}): pytest.approx(0.25),
            frozenset({0, 1, 2}): pytest.approx(0.25),
        }

    def test_root_without_in_edges(self):
        g = wgraph(3, [(0, 1, 0.5)])
        assert exact_rr_distribution(g, 0) == {frozenset({0}): pytest.approx(1.0)}

    def test_deterministic_edge(self):
        g = wgraph(2, [(0, 1, 1.0)])
        assert exact_rr_distribution(g, 1) == {frozenset({0, 1}): pytest.approx(1.0)}

    def test_distribution_properties(self):
        rng = random.Random(21)
        for _ in range(12):
            g = random_weighted_graph(rng, max_nodes=5, max_edges=8)
            root = rng.randrange(g.n)
            dist = exact_rr_distribution(g, root)
            assert math.isclose(sum(dist.values()), 1.0, abs_tol=1e-12)
            assert all(root in s for s in dist)

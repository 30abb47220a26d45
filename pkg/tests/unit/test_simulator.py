from collections import Counter

import pytest

from framework.error_code.errors import DetailedError, ErrorCode
from services.counting.sequences import validate_sequence
from services.graph.generators import gen_random_tree, gen_small_world
from services.graph.graph_core import Graph, distances_from
from services.spread.seeding import derive_seed, derive_stream, splitmix64
from services.spread.simulator import PlacementParams, is_separated, pick_sources, simulate_si


class TestSeeding:

    def test_splitmix64_reference_outputs(self):
        assert splitmix64(0) == 0xE220A8397B1DCDAF
        assert derive_seed(0, 0) == 0x6E789E6AA1B965F4

    def test_streams_differ_per_run(self):
        first = derive_stream(42, 0, 4)
        second = derive_stream(42, 1, 4)

        assert len(set(first)) == 4
        assert not set(first) & set(second)
        assert derive_stream(42, 0, 4) == first

    def test_seeds_fit_in_64_bits(self):
        assert all(0 <= derive_seed(2 ** 64 - 1, i) < 2 ** 64 for i in range(10))


class TestPickSources:

    def test_sources_respect_separation(self):
        g = gen_random_tree(60, seed=3)

        sources = pick_sources(g, PlacementParams(k=3, tau=3, seed=9))

        assert len(sources) == 3
        assert is_separated(g, sources, 3)
        for s in sources:
            dist = distances_from(g, s)
            assert all(dist[t] >= 3 for t in sources if t != s)

    def test_impossible_placement_raises(self):
        path = Graph.from_edges(3, [(0, 1), (1, 2)])

        with pytest.raises(DetailedError) as exc_info:
            pick_sources(path, PlacementParams(k=2, tau=3, max_attempts=50, seed=0))

        assert exc_info.value.code == ErrorCode.PLACEMENT_ERROR

    def test_tau_below_two_rejected(self):
        with pytest.raises(DetailedError):
            PlacementParams(k=2, tau=1)


class TestSimulateSi:

    def test_order_is_an_infection_sequence(self):
        g = gen_small_world(80, 4, 0.2, seed=1)
        sources = (0, 40)

        outcome = simulate_si(g, sources, stop_n=50, seed=7)

        assert outcome.infected_order[:2] == sources
        assert len(outcome.infected_order) == 50
        assert validate_sequence(g, sources, outcome.infected_order[2:])

    def test_parents_are_earlier_neighbours(self):
        g = gen_random_tree(100, seed=2)

        outcome = simulate_si(g, (5,), stop_n=60, seed=3)

        position = {v: i for i, v in enumerate(outcome.infected_order)}
        for v, p in outcome.parent.items():
            assert g.has_edge(v, p)
            assert position[p] < position[v]

    def test_true_partition_regions_are_connected(self):
        g = gen_random_tree(120, seed=4)

        outcome = simulate_si(g, (0, 60), stop_n=80, seed=5)

        assert outcome.true_partition.is_valid(g)
        assert sorted(outcome.true_partition.region_of) == sorted(outcome.infected_order)

    def test_same_seed_same_outcome(self):
        g = gen_small_world(60, 4, 0.3, seed=8)

        first = simulate_si(g, (1, 30), stop_n=40, seed=11)
        second = simulate_si(g, (1, 30), stop_n=40, seed=11)

        assert first.to_dict() == second.to_dict()

    def test_stop_n_equal_to_source_count(self):
        g = gen_random_tree(10, seed=0)

        outcome = simulate_si(g, (2, 7), stop_n=2, seed=0)

        assert outcome.infected_order == (2, 7)
        assert outcome.elapsed == 0.0

    def test_stop_n_beyond_reachable_raises(self):
        g = Graph.from_edges(4, [(0, 1), (2, 3)])

        with pytest.raises(DetailedError) as exc_info:
            simulate_si(g, (0,), stop_n=3, seed=0)

        assert exc_info.value.code == ErrorCode.VALIDATION_ERROR

    def test_stop_time_cuts_the_run_short(self):
        g = gen_random_tree(200, seed=6)

        outcome = simulate_si(g, (0,), stop_n=200, seed=1, stop_time=0.5)

        assert outcome.elapsed <= 0.5
        assert len(outcome.infected_order) < 200

    def test_from_dict_rebuilds_partition(self):
        from services.spread.simulator import InfectionOutcome
        g = gen_random_tree(50, seed=9)
        outcome = simulate_si(g, (0, 25), stop_n=30, seed=2)

        rebuilt = InfectionOutcome.from_dict(outcome.to_dict())

        assert rebuilt.true_partition == outcome.true_partition


def susceptible_edge_law(g: Graph, infected) -> dict:
    """P(next infected = v) proportional to v's infected neighbours"""
    counts = {}
    for u in infected:
        for w in g.neighbors(u):
            if w not in infected:
                counts[w] = counts.get(w, 0) + 1
    total = sum(counts.values())
    return {v: c / total for v, c in counts.items()}


class TestSpreadingLaw:

    TRIALS = 10_000

    def test_path_spreads_in_a_fixed_order(self):
        path = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])

        orders = {simulate_si(path, (0,), stop_n=3, seed=seed).infected_order for seed in range(50)}

        assert orders == {(0, 1, 2)}

    def test_star_first_infection_is_uniform(self):
        star = Graph.from_edges(6, [(0, leaf) for leaf in range(1, 6)])

        firsts = Counter(simulate_si(star, (0,), stop_n=2, seed=seed).infected_order[1] for seed in range(self.TRIALS))

        assert sorted(firsts) == [1, 2, 3, 4, 5]
        for leaf in range(1, 6):
            assert firsts[leaf] / self.TRIALS == pytest.approx(0.2, abs=0.02)

    def test_next_node_follows_susceptible_edge_counts(self):
        # node 2 touches both sources, 3 and 4 one each
        g = Graph.from_edges(5, [(0, 2), (1, 2), (1, 3), (0, 4)])
        expected = susceptible_edge_law(g, {0, 1})

        nexts = Counter(simulate_si(g, (0, 1), stop_n=3, seed=seed).infected_order[2] for seed in range(self.TRIALS))

        assert expected == {2: 0.5, 3: 0.25, 4: 0.25}
        for v, p in expected.items():
            assert nexts[v] / self.TRIALS == pytest.approx(p, abs=0.02)

    def test_law_is_memoryless_after_first_step(self):
        g = Graph.from_edges(4, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)])
        expected = susceptible_edge_law(g, {0, 1})

        orders = [simulate_si(g, (0,), stop_n=3, seed=seed).infected_order for seed in range(self.TRIALS)]
        given_one = [order[2] for order in orders if order[1] == 1]
        nexts = Counter(given_one)

        assert expected == pytest.approx({2: 2 / 3, 3: 1 / 3})
        assert len(given_one) > self.TRIALS // 3
        for v, p in expected.items():
            assert nexts[v] / len(given_one) == pytest.approx(p, abs=0.03)

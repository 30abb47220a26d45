"""Self-checks of the closed-form counts against brute-force enumeration"""
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Tuple

import numpy as np

from application.cli import fixtures
from services.counting.sequences import (
    enumerate_sequences,
    best_colorings,
    partition_weight,
    paths_meet_only_at_sources,
    sequence_probability,
    source_paths_subgraph,
)
from services.counting.tree_tables import (
    descending_prefix_sums,
    pair_count,
    prefix_sums,
    single_source_count,
    tree_tables,
)
from services.estimation.estimators import tse
from services.graph.generators import gen_random_tree
from services.graph.graph_core import Graph
from services.partition.voronoi import voronoi_partition
from services.spread.seeding import derive_seed

CHECKS = ("lemma1", "lemma2", "theorem1", "figure1")
DEFAULT_TRIALS = {"lemma1": 200, "lemma2": 100, "theorem1": 50, "figure1": 1}
REL_TOL = 1e-9


@dataclass
class OracleReport:
    check: str
    passed: int = 0
    failed: int = 0
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def record(self, ok: bool, detail: str) -> None:
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            self.failures.append(detail)

    def to_dict(self) -> Dict[str, Any]:
        return {"check": self.check, "passed": self.passed, "failed": self.failed, "failures": self.failures[:20]}

    def summary(self) -> str:
        return f"{self.check}: {self.passed} passed, {self.failed} failed"


def _close(log_value: float, count: int) -> bool:
    return math.isclose(math.exp(log_value), count, rel_tol=REL_TOL)


def _random_trees(trials: int, seed: int, n_min: int, n_max: int) -> List[Tuple[int, Graph]]:
    rng = np.random.default_rng(seed)
    trees = []
    for t in range(trials):
        n = int(rng.integers(n_min, n_max + 1))
        trees.append((t, gen_random_tree(n, derive_seed(seed, t))))
    return trees


def check_lemma1(trials: int, seed: int) -> OracleReport:
    report = OracleReport("lemma1")
    for t, g in _random_trees(trials, seed, 1, 9):
        table = tree_tables(g)
        for root in g.nodes():
            closed = single_source_count(g, root, table).log_value
            exact = enumerate_sequences(g, (root,)).count
            report.record(_close(closed, exact), f"tree {t} root {root}: {math.exp(closed)} != {exact}")
    return report


def check_lemma2(trials: int, seed: int) -> OracleReport:
    report = OracleReport("lemma2")
    for t, g in _random_trees(trials, seed, 2, 9):
        exact_counts: Dict[Tuple[int, int], int] = {}
        for a in g.nodes():
            for b in range(a + 1, g.node_count):
                closed = pair_count(g, a, b).log_value
                exact = enumerate_sequences(g, (a, b)).count
                exact_counts[(a, b)] = exact
                report.record(_close(closed, exact), f"tree {t} pair ({a}, {b}): {math.exp(closed)} != {exact}")
        top = max(exact_counts.values())
        expected = min(pair for pair, count in exact_counts.items() if count == top)
        got = tse(g).nodes
        report.record(tuple(got) == expected, f"tree {t}: tse picked {got}, enumeration picked {expected}")
    return report


def source_chain_instance(
    seed: int, max_path_nodes: int = 11, max_three_source_nodes: int = 9
) -> Tuple[Graph, Tuple[int, ...]]:
    """The path 0..L with sources at both ends and, on shorter paths, sometimes one in between

    Source-to-source segments meet only at sources and H_n is the whole path.
    """
    rng = np.random.default_rng(seed)
    length = int(rng.integers(1, max_path_nodes))
    g = Graph.from_edges(length + 1, [(i, i + 1) for i in range(length)])
    if 2 <= length < max_three_source_nodes and rng.random() < 0.5:
        return g, (0, int(rng.integers(1, length)), length)
    return g, (0, length)


def check_theorem1(trials: int, seed: int) -> OracleReport:
    report = OracleReport("theorem1")
    for t in range(trials):
        g, sources = source_chain_instance(derive_seed(seed, t))
        h = source_paths_subgraph(g, sources)
        if not paths_meet_only_at_sources(h.graph, h.to_local(sources)):
            report.record(False, f"instance {t}: segments meet outside the sources")
            continue
        local_sources = h.to_local(sources)
        voronoi = voronoi_partition(h.graph, local_sources)
        weight = partition_weight(h.graph, local_sources, voronoi)
        best, _ = best_colorings(h.graph, local_sources)
        report.record(weight.isclose(best), f"instance {t}: voronoi {weight.log_value} < best {best.log_value}")
    return report


def check_figure1(trials: int = 1, seed: int = 0) -> OracleReport:
    report = OracleReport("figure1")
    probability = sequence_probability(fixtures.two_source_example(), fixtures.EXAMPLE_SOURCES, fixtures.EXAMPLE_SEQUENCE)
    report.record(probability == fixtures.EXAMPLE_PROBABILITY, f"P(sigma | S) = {probability}, expected 1/8")
    sums = tuple(prefix_sums(fixtures.REVERSE_SUBTREE_SIZES))
    report.record(sums == fixtures.REVERSE_PREFIX_SUMS, f"prefix sums {sums}, expected {fixtures.REVERSE_PREFIX_SUMS}")
    descending = tuple(descending_prefix_sums(fixtures.REVERSE_SUBTREE_SIZES))
    report.record(descending == (3, 5, 6), f"descending prefix sums {descending}, expected (3, 5, 6)")
    return report


SUITES: Dict[str, Callable[[int, int], OracleReport]] = {
    "lemma1": check_lemma1,
    "lemma2": check_lemma2,
    "theorem1": check_theorem1,
    "figure1": check_figure1,
}


def run_check(name: str, trials: int, seed: int) -> OracleReport:
    return SUITES[name](trials, seed)

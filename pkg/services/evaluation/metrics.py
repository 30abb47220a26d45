from dataclasses import dataclass
from itertools import permutations
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import linear_sum_assignment

from framework.error_code.errors import argument_error, structure_error
from services.graph.graph_core import Graph, diameter, distances_from
from services.partition.regions import Partition

EXHAUSTIVE_LIMIT = 5
DIAMETER = "diameter"


@dataclass(frozen=True)
class MetricConfig:
    """``eta_penalty`` is a hop count or the string "diameter" (resolved per infection graph)"""
    eta_penalty: Union[float, str] = 0.0

    def __post_init__(self) -> None:
        if isinstance(self.eta_penalty, str):
            if self.eta_penalty != DIAMETER:
                raise argument_error("eta_penalty must be a number or 'diameter'", eta_penalty=self.eta_penalty)
        elif self.eta_penalty < 0:
            raise argument_error("eta_penalty must be nonnegative", eta_penalty=self.eta_penalty)

    def resolve(self, g_n: Graph) -> float:
        return float(diameter(g_n)) if self.eta_penalty == DIAMETER else float(self.eta_penalty)


@dataclass(frozen=True)
class Matching:
    """Matched (truth node, estimated node) pairs and their summed hop distance"""
    pairs: Tuple[Tuple[int, int], ...]
    cost: int

    def estimate_for(self) -> Dict[int, int]:
        return dict(self.pairs)


def _cost_matrix(g_n: Graph, truth: Sequence[int], est: Sequence[int]) -> np.ndarray:
    cost = np.zeros((len(truth), len(est)), dtype=np.int64)
    for i, s in enumerate(truth):
        dist = distances_from(g_n, s)
        for j, e in enumerate(est):
            if e not in dist:
                raise structure_error(f"no path between {s} and {e}")
            cost[i, j] = dist[e]
    return cost


def match_sources(g_n: Graph, est: Sequence[int], truth: Sequence[int]) -> Matching:
    """Injective matching of min(|est|, |truth|) sources minimising total hop distance"""
    if not est or not truth:
        raise argument_error("estimated and true source sets must be non-empty")
    for v in list(est) + list(truth):
        g_n.check_node(v)
    cost = _cost_matrix(g_n, truth, est)
    m = min(len(truth), len(est))

    if max(len(truth), len(est)) <= EXHAUSTIVE_LIMIT:
        best: List[Tuple[int, int]] = []
        best_cost = None
        if len(truth) <= len(est):
            candidates = (list(enumerate(perm)) for perm in permutations(range(len(est)), m))
        else:
            candidates = ([(i, j) for j, i in enumerate(perm)] for perm in permutations(range(len(truth)), m))
        for assignment in candidates:
            total = sum(int(cost[i, j]) for i, j in assignment)
            if best_cost is None or total < best_cost:
                best, best_cost = assignment, total
        rows = best
    else:
        row_ind, col_ind = linear_sum_assignment(cost)
        rows = list(zip(row_ind.tolist(), col_ind.tolist()))

    pairs = tuple(sorted((truth[i], est[j]) for i, j in rows))
    return Matching(pairs=pairs, cost=sum(int(cost[i, j]) for i, j in rows))


def error_distance(g_n: Graph, est: Sequence[int], truth: Sequence[int], cfg: MetricConfig) -> float:
    """(matched hop distance + eta * ||est| - |truth||) / |truth|"""
    matching = match_sources(g_n, est, truth)
    eta = cfg.resolve(g_n)
    return (matching.cost + eta * abs(len(est) - len(truth))) / len(truth)


def region_covering(truth_partition: Partition, est_partition: Partition, matching: Matching) -> float:
    """min over true regions of |estimated region ∩ true region| / |true region|; unmatched regions score 0"""
    if set(truth_partition.region_of) != set(est_partition.region_of):
        raise argument_error(
            "partitions cover different node sets",
            truth_nodes=len(truth_partition.region_of), est_nodes=len(est_partition.region_of)
        )
    est_regions = [set(r) for r in est_partition.regions()]
    est_index = {c: i for i, c in enumerate(est_partition.centers)}
    matched = matching.estimate_for()
    fractions = []
    for index, members in enumerate(truth_partition.regions()):
        source = truth_partition.centers[index]
        if source not in matched:
            fractions.append(0.0)
            continue
        overlap = est_regions[est_index[matched[source]]] & set(members)
        fractions.append(len(overlap) / len(members))
    return min(fractions)

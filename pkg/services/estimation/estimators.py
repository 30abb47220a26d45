"""Source estimators built on the infection-sequence counts

Every estimator returns a ``SourceEstimate`` in the node ids of the graph it
was given. Ties are broken towards the smallest node id, or the
lexicographically smallest pair, after a 1e-9 tolerance in the log domain.
"""
import math
from abc import ABC, abstractmethod
from collections import deque
from dataclasses import dataclass
from functools import cmp_to_key
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, TypeVar

from scipy.special import gammaln

from framework.error_code.errors import DetailedError, ErrorCode, argument_error
from services.counting.sequences import LogCount, sequence_log_probability
from services.counting.tree_tables import (
    PairScoreTable,
    SubtreeTable,
    all_single_source_counts,
    descending_prefix_sums,
    tree_tables,
)
from services.graph.graph_core import Graph, NodeSet, bfs_tree

TIE_TOLERANCE = 1e-9
DEFAULT_DELTA = 1.0

K = TypeVar("K")


@dataclass(frozen=True)
class GeoParams:
    """Regularity constants of a geometric tree plus the Q-factor delta"""
    alpha: float
    b: float
    c: float
    d_min: int
    d_max: int
    delta: float = DEFAULT_DELTA

    def __post_init__(self) -> None:
        if self.alpha <= 0 or self.b <= 0 or self.c <= 0:
            raise argument_error("alpha, b and c must be positive", alpha=self.alpha, b=self.b, c=self.c)
        if self.b > self.c:
            raise argument_error("b must not exceed c", b=self.b, c=self.c)
        if not 2 <= self.d_min <= self.d_max:
            raise argument_error("need 2 <= d_min <= d_max", d_min=self.d_min, d_max=self.d_max)
        if self.delta <= 0:
            raise argument_error("delta must be positive", delta=self.delta)


@dataclass(frozen=True)
class SourceEstimate:
    nodes: NodeSet
    score: LogCount
    algorithm: str

    def to_dict(self) -> Dict[str, Any]:
        return {"algo": self.algorithm, "nodes": list(self.nodes), "log_score": self.score.log_value}

    def relabel(self, local_to_global: Sequence[int]) -> "SourceEstimate":
        """Translate node ids through an induced-subgraph id table"""
        nodes = tuple(sorted(local_to_global[v] for v in self.nodes))
        return SourceEstimate(nodes=nodes, score=self.score, algorithm=self.algorithm)


def scores_tie(x: float, y: float) -> bool:
    return math.isclose(x, y, rel_tol=TIE_TOLERANCE, abs_tol=TIE_TOLERANCE)


def _argmax(scored: Iterable[Tuple[K, float]]) -> Tuple[K, float]:
    """Highest score; among tied scores the smallest key"""
    items = list(scored)
    top = max(score for _, score in items)
    winner = min(key for key, score in items if score == top or scores_tie(score, top))
    return winner, top


def _rank(scores: Sequence[float]) -> List[int]:
    """Node ids by descending score, ties by ascending id"""
    def compare(u: int, v: int) -> int:
        if not scores_tie(scores[u], scores[v]):
            return -1 if scores[u] > scores[v] else 1
        return u - v

    return sorted(range(len(scores)), key=cmp_to_key(compare))


def _require_nonempty(g_n: Graph) -> None:
    if g_n.node_count == 0:
        raise argument_error("the infection graph is empty")


# -- single source ---------------------------------------------------------

def single_source_scores(g_n: Graph, table: Optional[SubtreeTable] = None) -> List[float]:
    """log C(v, G_n) for every node of a tree"""
    _require_nonempty(g_n)
    g_n.require_tree()
    return all_single_source_counts(table if table is not None else tree_tables(g_n))


def bfs_weighted_scores(g_n: Graph) -> List[float]:
    """log P(sigma_v | v) + log C(v, T_bfs(v)) for every node of a connected graph"""
    _require_nonempty(g_n)
    g_n.require_connected()
    base = float(gammaln(g_n.node_count))
    scores = []
    for v in g_n.nodes():
        spanning = bfs_tree(g_n, v)
        table = tree_tables(spanning.tree, root=v)
        count = base - table.log_g_around[v]
        weight = sequence_log_probability(g_n, (v,), spanning.order[1:])
        scores.append(count + weight)
    return scores


def sse_tree(g_n: Graph) -> SourceEstimate:
    scores = single_source_scores(g_n)
    node, score = _argmax(enumerate(scores))
    return SourceEstimate(nodes=(node,), score=LogCount(score), algorithm="sse")


def sse_bfs(g_n: Graph) -> SourceEstimate:
    scores = bfs_weighted_scores(g_n)
    node, score = _argmax(enumerate(scores))
    return SourceEstimate(nodes=(node,), score=LogCount(score), algorithm="sse-bfs")


def nsse(g_n: Graph, k: int) -> SourceEstimate:
    """The k individually most likely single sources (trees: counts, otherwise BFS-weighted)"""
    _require_nonempty(g_n)
    if k < 1 or k > g_n.node_count:
        raise argument_error(f"k must lie in 1..{g_n.node_count}", k=k)
    scores = single_source_scores(g_n) if g_n.is_tree() else bfs_weighted_scores(g_n)
    chosen = _rank(scores)[:k]
    return SourceEstimate(
        nodes=tuple(sorted(chosen)),
        score=LogCount(scores[chosen[0]]),
        algorithm="nsse",
    )


# -- two sources -----------------------------------------------------------

class PairScorer(ABC):
    """Scores one candidate pair once its span is stored in the memo"""

    algorithm = "tse"

    @abstractmethod
    def score(self, memo: PairScoreTable, path: Sequence[int]) -> float:
        """Log score of the pair (path[0], path[-1]); ``path`` is the tree path between them"""
        pass


class ExactPairScorer(PairScorer):
    algorithm = "tse"

    def score(self, memo: PairScoreTable, path: Sequence[int]) -> float:
        return memo.log_pair_count(path[0], path[-1], path[1], path[-2])


class GeometricPairScorer(PairScorer):
    """log n! + (p-1) log 2(1+delta) - sum log I*_i - off-path log-products"""

    algorithm = "geo-tse"

    def __init__(self, delta: float = DEFAULT_DELTA) -> None:
        if delta <= 0:
            raise argument_error("delta must be positive", delta=delta)
        self.delta = delta
        self._log_factor = math.log(2.0 * (1.0 + delta))

    def path_sizes(self, table: SubtreeTable, path: Sequence[int]) -> List[int]:
        """|T_v(s1, s2)| for each node of the source path"""
        sizes = [table.end_node_size(path[0], path[1])]
        for i in range(1, len(path) - 1):
            sizes.append(table.path_node_size(path[i], path[i - 1], path[i + 1]))
        sizes.append(table.end_node_size(path[-1], path[-2]))
        return sizes

    def score(self, memo: PairScoreTable, path: Sequence[int]) -> float:
        table = memo.table
        p = len(path)
        prefix = descending_prefix_sums(self.path_sizes(table, path))
        return (
            float(gammaln(table.n + 1))
            + (p - 1) * self._log_factor
            - sum(math.log(i) for i in prefix)
            - memo.off_path_log_g(path[0], path[-1], path[1], path[-2])
        )


def _next_hops(g: Graph, root: int) -> Tuple[List[int], List[int]]:
    """(dist, hop) from one BFS; hop[x] is x's neighbour towards ``root``"""
    dist = [-1] * g.node_count
    hop = [-1] * g.node_count
    dist[root] = 0
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for w in g.neighbors(u):
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                hop[w] = u
                queue.append(w)
    return dist, hop


def pair_scores(g_n: Graph, scorer: PairScorer) -> Dict[Tuple[int, int], float]:
    """Score every pair a < b, sweeping hop distance 1..diameter so spans are memoised bottom-up"""
    if g_n.node_count < 2:
        raise argument_error("two-source estimation needs at least two nodes", n=g_n.node_count)
    g_n.require_tree()
    memo = PairScoreTable(g_n)
    towards: List[List[int]] = []
    by_distance: Dict[int, List[Tuple[int, int]]] = {}
    for root in g_n.nodes():
        dist, hop = _next_hops(g_n, root)
        towards.append(hop)
        for a in range(root):
            by_distance.setdefault(dist[a], []).append((a, root))

    scores: Dict[Tuple[int, int], float] = {}
    for d in sorted(by_distance):
        for a, b in by_distance[d]:
            # path a, u1, ..., ud, b
            path = [a]
            while path[-1] != b:
                path.append(towards[b][path[-1]])
            u1, ud = path[1], path[-2]
            ud_prev = path[-3] if d >= 2 else a
            memo.store(a, b, d, u1, ud, ud_prev)
            scores[(a, b)] = scorer.score(memo, path)
    return scores


def _pair_estimate(g_n: Graph, scorer: PairScorer) -> SourceEstimate:
    pair, score = _argmax(pair_scores(g_n, scorer).items())
    return SourceEstimate(nodes=pair, score=LogCount(score), algorithm=scorer.algorithm)


def tse(g_n: Graph) -> SourceEstimate:
    return _pair_estimate(g_n, ExactPairScorer())


def geometric_tse(g_n: Graph, geo: Optional[GeoParams] = None, delta: Optional[float] = None) -> SourceEstimate:
    """TSE with the Q-factor path term; ``delta`` overrides ``geo.delta``"""
    if delta is None:
        delta = geo.delta if geo is not None else DEFAULT_DELTA
    return _pair_estimate(g_n, GeometricPairScorer(delta))


# -- delta ------------------------------------------------------------------

def delta_interval(geo: GeoParams) -> Tuple[float, float]:
    """Open interval of admissible delta for the geometric estimator"""
    low = geo.c * geo.d_max / (geo.b * (geo.d_min - 1)) - 1.0
    high = geo.b * (geo.d_min - 2) / (2.0 * geo.c) - 1.0
    degree_floor = 1.5 + (geo.c / geo.b) * math.sqrt(2.0 * geo.d_max)
    context = {'low': low, 'high': high, 'd_min': geo.d_min, 'degree_floor': degree_floor}
    if geo.d_min < degree_floor:
        raise DetailedError(
            ErrorCode.INFEASIBILITY_ERROR,
            f"d_min {geo.d_min} is below {degree_floor:.4f}; delta interval ({low:.4f}, {high:.4f}) unusable",
            context=context
        )
    if not low < high:
        raise DetailedError(
            ErrorCode.INFEASIBILITY_ERROR,
            f"empty delta interval: low {low:.4f} >= high {high:.4f}",
            context=context
        )
    return low, high


def select_delta(geo: GeoParams) -> float:
    """Midpoint of the admissible interval (never below a small positive floor)"""
    low, high = delta_interval(geo)
    return max((low + high) / 2.0, high / 2.0, 1e-6)

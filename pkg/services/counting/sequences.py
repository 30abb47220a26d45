"""Brute-force infection-sequence machinery

These functions enumerate sequences (or infected-set states) exhaustively and
serve as correctness oracles for the closed-form tree counts. Exact integers
and fractions are used throughout; callers convert to LogCount at the end.
"""
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from framework.error_code.errors import DetailedError, ErrorCode, argument_error
from services.graph.graph_core import Graph, Subgraph, path_between
from services.partition.regions import Partition

DEFAULT_ENUMERATION_LIMIT = 12
NEG_INF = float("-inf")


@dataclass(frozen=True, order=True)
class LogCount:
    """Natural log of a positive count or weight; -inf stands for zero"""
    log_value: float

    @classmethod
    def of(cls, count) -> "LogCount":
        if count < 0:
            raise argument_error("counts are nonnegative", count=count)
        if count == 0:
            return cls(NEG_INF)
        if isinstance(count, Fraction):
            return cls(math.log(count.numerator) - math.log(count.denominator))
        return cls(math.log(count))

    @property
    def value(self) -> float:
        return math.exp(self.log_value)

    def isclose(self, other: "LogCount", rel_tol: float = 1e-9) -> bool:
        if self.log_value == other.log_value:
            return True
        return math.isclose(self.log_value, other.log_value, rel_tol=rel_tol, abs_tol=rel_tol)


@dataclass
class EnumerationResult:
    count: int
    sequences: Optional[List[Tuple[int, ...]]] = None


def _check_disjoint(sources: Sequence[int], seq: Sequence[int]) -> None:
    if len(set(seq)) != len(seq):
        raise argument_error("node repeated in sequence", sequence=list(seq))
    overlap = set(seq) & set(sources)
    if overlap:
        raise argument_error("sequence contains source nodes", nodes=sorted(overlap))


def validate_sequence(g: Graph, sources: Sequence[int], seq: Sequence[int]) -> bool:
    """Infection sequence property: each node has an earlier-infected neighbour"""
    _check_disjoint(sources, seq)
    infected = set(sources)
    for v in seq:
        g.check_node(v)
        if not any(w in infected for w in g.neighbors(v)):
            return False
        infected.add(v)
    return True


def _step_fractions(g: Graph, sources: Sequence[int], seq: Sequence[int]) -> List[Tuple[int, int]]:
    """(infected-neighbour edges of seq[l], susceptible edge set size) per step"""
    if not validate_sequence(g, sources, seq):
        raise argument_error("not an infection sequence", sequence=list(seq))
    infected = set(sources)
    susceptible_edges = sum(1 for s in infected for w in g.neighbors(s) if w not in infected)
    steps = []
    for v in seq:
        into = sum(1 for w in g.neighbors(v) if w in infected)
        steps.append((into, susceptible_edges))
        infected.add(v)
        out = sum(1 for w in g.neighbors(v) if w not in infected)
        susceptible_edges += out - into
    return steps


def sequence_probability(g: Graph, sources: Sequence[int], seq: Sequence[int]) -> Fraction:
    """Exact P(sigma | S) over the full graph ``g``"""
    result = Fraction(1)
    for into, total in _step_fractions(g, sources, seq):
        result *= Fraction(into, total)
    return result


def sequence_log_probability(g: Graph, sources: Sequence[int], seq: Sequence[int]) -> float:
    return sum(math.log(into) - math.log(total) for into, total in _step_fractions(g, sources, seq))


def _guard(free: int, limit: int) -> None:
    if free > limit:
        raise DetailedError(
            ErrorCode.REFUSAL_ERROR,
            f"refusing to enumerate {free} free nodes (limit {limit})",
            context={'free_nodes': free, 'limit': limit}
        )


def enumerate_sequences(
    g_n: Graph,
    sources: Sequence[int],
    collect: bool = False,
    limit: int = DEFAULT_ENUMERATION_LIMIT,
) -> EnumerationResult:
    """Exact |Omega(G_n, S)|; with ``collect`` also the sequences themselves"""
    for s in sources:
        g_n.check_node(s, "source")
    free = [v for v in g_n.nodes() if v not in set(sources)]
    _guard(len(free), limit)
    bit = {v: 1 << i for i, v in enumerate(free)}
    full = (1 << len(free)) - 1
    source_set = set(sources)

    def ready(v: int, mask: int) -> bool:
        return any(w in source_set or (w in bit and mask & bit[w]) for w in g_n.neighbors(v))

    if collect:
        found: List[Tuple[int, ...]] = []
        prefix: List[int] = []

        def walk(mask: int) -> None:
            if mask == full:
                found.append(tuple(prefix))
                return
            for v in free:
                if not mask & bit[v] and ready(v, mask):
                    prefix.append(v)
                    walk(mask | bit[v])
                    prefix.pop()

        walk(0)
        return EnumerationResult(count=len(found), sequences=found)

    memo: Dict[int, int] = {full: 1}

    def count(mask: int) -> int:
        if mask in memo:
            return memo[mask]
        total = sum(count(mask | bit[v]) for v in free if not mask & bit[v] and ready(v, mask))
        memo[mask] = total
        return total

    return EnumerationResult(count=count(0))


def source_paths_subgraph(g_n: Graph, sources: Sequence[int]) -> Subgraph:
    """H_n: union of the tree paths between every pair of sources"""
    g_n.require_tree()
    nodes = set(sources)
    for i, a in enumerate(sources):
        for b in sources[i + 1:]:
            nodes.update(path_between(g_n, a, b))
    return g_n.induced_subgraph(nodes)


def paths_meet_only_at_sources(h_n: Graph, sources: Sequence[int]) -> bool:
    """Every non-source node of H_n lies on exactly one source-to-source segment"""
    source_set = set(sources)
    return all(h_n.degree(v) == 2 for v in h_n.nodes() if v not in source_set)


def partition_weight(
    h_n: Graph,
    sources: Sequence[int],
    coloring: Partition,
    limit: int = DEFAULT_ENUMERATION_LIMIT,
) -> LogCount:
    """Unnormalised P(A_n | S, G_n): sum of P(sigma | S) over sequences consistent with the coloring

    A sequence is consistent when, restricted to each color class, it is an
    infection sequence from that class's source. Step probabilities use the
    susceptible edge set of ``h_n``; when segments meet only at sources this is
    the 2^p * prod p_l form.
    """
    source_set = set(sources)
    for index, s in enumerate(sources):
        if coloring.region_of.get(s) != index:
            raise argument_error(f"source {s} is not in its own color class", source=s)
    if not coloring.is_valid(h_n):
        raise argument_error("color classes must be connected and contain their source")
    free = [v for v in h_n.nodes() if v not in source_set]
    missing = [v for v in free if v not in coloring.region_of]
    if missing:
        raise argument_error("coloring does not cover H_n", nodes=missing)
    _guard(len(free), limit)

    color = coloring.region_of
    bit = {v: 1 << i for i, v in enumerate(free)}
    full = (1 << len(free)) - 1

    def infected(w: int, mask: int) -> bool:
        return w in source_set or bool(mask & bit[w])

    def susceptible_edges(mask: int) -> int:
        return sum(
            1
            for u in h_n.nodes() if infected(u, mask)
            for w in h_n.neighbors(u) if not infected(w, mask)
        )

    memo: Dict[int, Fraction] = {full: Fraction(1)}

    def weight(mask: int) -> Fraction:
        if mask in memo:
            return memo[mask]
        total_edges = susceptible_edges(mask)
        acc = Fraction(0)
        for v in free:
            if mask & bit[v]:
                continue
            into = sum(1 for w in h_n.neighbors(v) if infected(w, mask))
            same_color = any(infected(w, mask) and color[w] == color[v] for w in h_n.neighbors(v))
            if into and same_color:
                acc += Fraction(into, total_edges) * weight(mask | bit[v])
        memo[mask] = acc
        return acc

    return LogCount.of(weight(0))


def valid_colorings(h_n: Graph, sources: Sequence[int]) -> List[Partition]:
    """All colorings of H_n whose classes are connected and hold their source"""
    source_set = set(sources)
    free = [v for v in h_n.nodes() if v not in source_set]
    result = []
    for assignment in product(range(len(sources)), repeat=len(free)):
        region_of = {s: i for i, s in enumerate(sources)}
        region_of.update(zip(free, assignment))
        candidate = Partition(region_of=region_of, centers=tuple(sources))
        if candidate.is_valid(h_n):
            result.append(candidate)
    return result


def best_colorings(
    h_n: Graph,
    sources: Sequence[int],
    limit: int = DEFAULT_ENUMERATION_LIMIT,
) -> Tuple[LogCount, List[Partition]]:
    """Maximum partition_weight over valid colorings and every coloring attaining it"""
    scored = [(partition_weight(h_n, sources, c, limit), c) for c in valid_colorings(h_n, sources)]
    best = max(score for score, _ in scored)
    return best, [c for score, c in scored if score.isclose(best)]


def virtual_node_bound(g_n: Graph, s1: int, s2: int, limit: int = DEFAULT_ENUMERATION_LIMIT) -> Tuple[int, int]:
    """(C(x1, x2; G'_n), 2(n-1) C(s1, s2; G_n)) with x_i a virtual leaf on s_i"""
    n = g_n.node_count
    x1, x2 = n, n + 1
    augmented = Graph.from_edges(n + 2, list(g_n.edges()) + [(s1, x1), (s2, x2)])
    lhs = enumerate_sequences(augmented, (x1, x2), limit=limit).count
    rhs = 2 * (n - 1) * enumerate_sequences(g_n, (s1, s2), limit=limit).count
    return lhs, rhs

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from framework.error_code.errors import DetailedError, ErrorCode, argument_error
from services.graph.graph_core import Graph, NodeSet, distances_from, make_node_set
from services.graph.generators import largest_component
from services.partition.regions import Partition


@dataclass(frozen=True)
class PlacementParams:
    """Random source placement with minimum pairwise hop separation ``tau``"""
    k: int
    tau: int = 2
    max_attempts: int = 1000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.k < 1:
            raise argument_error("k must be at least 1", k=self.k)
        if self.tau < 2:
            raise argument_error("tau must be at least 2", tau=self.tau)
        if self.max_attempts < 1:
            raise argument_error("max_attempts must be at least 1", max_attempts=self.max_attempts)


@dataclass(frozen=True)
class InfectionOutcome:
    """Result of one SI run: infection order, infecting parents and ground truth"""
    sources: Tuple[int, ...]
    infected_order: Tuple[int, ...]
    parent: Dict[int, int]
    true_partition: Partition
    elapsed: float

    @property
    def infected(self) -> NodeSet:
        return make_node_set(self.infected_order)

    def infection_graph(self, g: Graph):
        """Subgraph of ``g`` induced by the infected nodes (with id tables)"""
        return g.induced_subgraph(self.infected_order)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sources": list(self.sources),
            "order": list(self.infected_order),
            "parent": {str(v): p for v, p in sorted(self.parent.items())},
            "elapsed": self.elapsed,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "InfectionOutcome":
        sources = tuple(int(s) for s in data["sources"])
        parent = {int(v): int(p) for v, p in data["parent"].items()}
        order = tuple(int(v) for v in data["order"])
        return cls(
            sources=sources,
            infected_order=order,
            parent=parent,
            true_partition=partition_from_parents(sources, order, parent),
            elapsed=float(data["elapsed"]),
        )


def partition_from_parents(sources: Sequence[int], order: Sequence[int], parent: Dict[int, int]) -> Partition:
    """Trace each node's parent chain back to its source"""
    index = {s: i for i, s in enumerate(sources)}
    region_of: Dict[int, int] = {}
    for v in order:
        region_of[v] = index[v] if v in index else region_of[parent[v]]
    return Partition(region_of=region_of, centers=tuple(sources))


def _ball(g: Graph, center: int, radius: int) -> Set[int]:
    seen = {center}
    frontier = [center]
    for _ in range(radius):
        nxt = []
        for u in frontier:
            for w in g.neighbors(u):
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return seen


def is_separated(g: Graph, nodes: Sequence[int], tau: int) -> bool:
    """True iff every pair of ``nodes`` is at hop distance >= tau"""
    for i, u in enumerate(nodes):
        near = _ball(g, u, tau - 1)
        if any(v in near for v in nodes[i + 1:]):
            return False
    return True


def pick_sources(g: Graph, params: PlacementParams) -> NodeSet:
    """Rejection-sample ``k`` nodes of the largest component, pairwise >= tau apart"""
    component = largest_component(g)
    if params.k > len(component):
        raise DetailedError(
            ErrorCode.PLACEMENT_ERROR,
            f"cannot place {params.k} sources in a component of {len(component)} nodes",
            context={'k': params.k, 'tau': params.tau}
        )
    rng = np.random.default_rng(params.seed)
    pool = np.asarray(component, dtype=np.int64)
    for _ in range(params.max_attempts):
        draw = [int(v) for v in rng.choice(pool, size=params.k, replace=False)]
        if params.k == 1 or is_separated(g, draw, params.tau):
            return make_node_set(draw)
    raise DetailedError(
        ErrorCode.PLACEMENT_ERROR,
        f"no placement of {params.k} sources at separation {params.tau} after {params.max_attempts} attempts",
        context={'k': params.k, 'tau': params.tau, 'max_attempts': params.max_attempts}
    )


class _FrontierEdges:
    """Susceptible edge set (infected -> susceptible) with O(1) sampling and removal"""

    def __init__(self) -> None:
        self.edges: List[Tuple[int, int]] = []
        self.position: Dict[Tuple[int, int], int] = {}
        self.into: Dict[int, List[Tuple[int, int]]] = {}

    def __len__(self) -> int:
        return len(self.edges)

    def add(self, infected: int, susceptible: int) -> None:
        edge = (infected, susceptible)
        self.position[edge] = len(self.edges)
        self.edges.append(edge)
        self.into.setdefault(susceptible, []).append(edge)

    def remove_into(self, v: int) -> None:
        for edge in self.into.pop(v, []):
            i = self.position.pop(edge)
            last = self.edges.pop()
            if i < len(self.edges):
                self.edges[i] = last
                self.position[last] = i


def simulate_si(
    g: Graph,
    sources: Sequence[int],
    stop_n: int,
    seed: int,
    stop_time: Optional[float] = None,
) -> InfectionOutcome:
    """Exact SI spreading with i.i.d. rate-1 exponential clocks on every edge

    At each step the total clock rate is the size of the susceptible edge set,
    the waiting time is Exponential(rate) and the edge that fires is uniform
    over that set, which fixes both the new node and its infecting parent.
    """
    if not sources:
        raise argument_error("at least one source is required")
    for s in sources:
        g.check_node(s, "source")
    if len(set(sources)) != len(sources):
        raise argument_error("sources must be distinct", sources=list(sources))
    if stop_n < len(sources):
        raise argument_error("stop_n must be at least the number of sources", stop_n=stop_n, sources=len(sources))
    reachable: Set[int] = set()
    for s in sources:
        if s not in reachable:
            reachable.update(distances_from(g, s))
    if stop_n > len(reachable):
        raise argument_error(
            f"stop_n {stop_n} exceeds the {len(reachable)} nodes reachable from the sources",
            stop_n=stop_n, reachable=len(reachable)
        )

    rng = np.random.default_rng(seed)
    infected = set(sources)
    order: List[int] = list(sources)
    parent: Dict[int, int] = {}
    frontier = _FrontierEdges()
    for s in sources:
        for w in g.neighbors(s):
            if w not in infected:
                frontier.add(s, w)

    elapsed = 0.0
    while len(order) < stop_n:
        rate = len(frontier)
        wait = float(rng.exponential(1.0 / rate))
        if stop_time is not None and elapsed + wait > stop_time:
            break
        elapsed += wait
        u, v = frontier.edges[int(rng.integers(rate))]
        frontier.remove_into(v)
        infected.add(v)
        order.append(v)
        parent[v] = u
        for w in g.neighbors(v):
            if w not in infected:
                frontier.add(v, w)

    source_tuple = tuple(sources)
    return InfectionOutcome(
        sources=source_tuple,
        infected_order=tuple(order),
        parent=parent,
        true_partition=partition_from_parents(source_tuple, order, parent),
        elapsed=elapsed,
    )

"""Multiple-source estimation and partitioning

``infection_partitioning`` alternates a Voronoi partition with a per-region
single-source estimate until the sources stop moving. ``msep`` starts from
``k_max`` spread-out sources and merges adjacent regions whose joint
two-source estimate lands closer than ``tau`` hops; ``msep_bfs`` does the same
on general graphs using BFS spanning trees of the regions.
"""
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from framework.error_code.errors import DetailedError, ErrorCode, argument_error, structure_error
from framework.interfaces.core import LogProvider
from infrastructure.logging.structured import StructuredLog
from services.estimation.estimators import SourceEstimate, sse_bfs, sse_tree, tse
from services.graph.graph_core import Graph, NodeSet, bfs_tree, distances_from
from services.partition.regions import Partition
from services.partition.voronoi import voronoi_partition
from services.spread.seeding import derive_seed
from services.spread.simulator import PlacementParams, pick_sources

SingleEstimator = Callable[[Graph], SourceEstimate]


@dataclass(frozen=True)
class MsepConfig:
    k_max: int = 3
    tau: int = 2
    max_iter: int = 20
    eta_converge: int = 0
    seed: int = 0
    max_attempts: int = 1000

    def __post_init__(self) -> None:
        if self.k_max < 1:
            raise argument_error("k_max must be at least 1", k_max=self.k_max)
        if self.tau < 2:
            raise argument_error("tau must be at least 2", tau=self.tau)
        if self.max_iter < 1:
            raise argument_error("max_iter must be at least 1", max_iter=self.max_iter)
        if self.eta_converge < 0:
            raise argument_error("eta_converge must be nonnegative", eta_converge=self.eta_converge)


@dataclass
class MsepResult:
    sources: NodeSet
    partition: Partition
    merge_log: List[Dict[str, Any]] = field(default_factory=list)
    ip_iterations: int = 0

    @property
    def k_final(self) -> int:
        return len(self.sources)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sources": list(self.sources),
            "regions": self.partition.regions(),
            "k_final": self.k_final,
            "merge_log": list(self.merge_log),
        }


def _hop_distance(g: Graph, u: int, v: int) -> int:
    return distances_from(g, u)[v]


def greedy_dispersion(g_n: Graph, k: int) -> NodeSet:
    """Farthest-point seeding: start at a peripheral node, then repeatedly add the node farthest from the chosen set"""
    k = min(k, g_n.node_count)
    from_zero = distances_from(g_n, 0)
    first = max(from_zero, key=lambda v: (from_zero[v], -v))
    chosen = [first]
    nearest = dict(distances_from(g_n, first))
    while len(chosen) < k:
        nxt = max((v for v in nearest if v not in chosen), key=lambda v: (nearest[v], -v))
        chosen.append(nxt)
        for v, d in distances_from(g_n, nxt).items():
            if d < nearest[v]:
                nearest[v] = d
    return tuple(sorted(chosen))


def initial_sources(g_n: Graph, cfg: MsepConfig, log: LogProvider) -> NodeSet:
    """pick_sources at separation tau, relaxing tau towards 2, then greedy dispersion"""
    seed = derive_seed(cfg.seed, 0)
    for tau in range(cfg.tau, 1, -1):
        try:
            return pick_sources(g_n, PlacementParams(k=cfg.k_max, tau=tau, max_attempts=cfg.max_attempts, seed=seed))
        except DetailedError as e:
            if e.code != ErrorCode.PLACEMENT_ERROR:
                raise
            if tau > 2:
                log.warning("placement_relaxed", k=cfg.k_max, tau=tau, next_tau=tau - 1)
    log.warning("placement_fallback_dispersion", k=cfg.k_max, nodes=g_n.node_count)
    return greedy_dispersion(g_n, cfg.k_max)


def infection_partitioning(
    g_n: Graph,
    s0: Sequence[int],
    cfg: MsepConfig,
    single: Optional[SingleEstimator] = None,
    log: Optional[LogProvider] = None,
) -> Tuple[NodeSet, Partition]:
    sources, partition, _ = _partition_until_stable(g_n, s0, cfg, single, log or StructuredLog())
    return sources, partition


def _partition_until_stable(
    g_n: Graph,
    s0: Sequence[int],
    cfg: MsepConfig,
    single: Optional[SingleEstimator],
    log: LogProvider,
) -> Tuple[NodeSet, Partition, int]:
    if not s0:
        raise argument_error("at least one initial source is required")
    if single is None:
        single = sse_tree if g_n.is_tree() else sse_bfs
    sources = list(s0)
    partition = voronoi_partition(g_n, sources)
    iterations = 0
    for iterations in range(1, cfg.max_iter + 1):
        moved = []
        for members in partition.regions():
            region = g_n.induced_subgraph(members)
            estimate = single(region.graph)
            moved.append(region.local_to_global[estimate.nodes[0]])
        movement = max(_hop_distance(g_n, old, new) for old, new in zip(sources, moved))
        sources = moved
        partition = voronoi_partition(g_n, sources)
        if movement <= cfg.eta_converge:
            log.info("ip_converged", iterations=iterations, sources=sources)
            break
    else:
        log.debug("ip_iteration_cap", iterations=iterations, sources=sources)
    return tuple(sources), partition, iterations


PairGraphBuilder = Callable[[Graph, Partition, int, int], Tuple[Graph, Tuple[int, ...]]]


def _region_union(g_n: Graph, partition: Partition, i: int, j: int) -> Tuple[Graph, Tuple[int, ...]]:
    union = g_n.induced_subgraph(partition.region(i) + partition.region(j))
    if not union.graph.is_tree():
        raise structure_error("merged regions do not form a tree", regions=[i, j])
    return union.graph, union.local_to_global


class _JoinedBfsTrees:
    """T_bfs(s_i, A_i) and T_bfs(s_j, A_j) joined by one random crossing edge"""

    def __init__(self, seed: int) -> None:
        self.rng = np.random.default_rng(seed)

    def __call__(self, g_n: Graph, partition: Partition, i: int, j: int) -> Tuple[Graph, Tuple[int, ...]]:
        members = {i: partition.region(i), j: partition.region(j)}
        local_to_global = tuple(sorted(members[i] + members[j]))
        local = {v: x for x, v in enumerate(local_to_global)}
        edges: List[Tuple[int, int]] = []
        for r in (i, j):
            region = g_n.induced_subgraph(members[r])
            root = region.global_to_local[partition.centers[r]]
            for child, parent in bfs_tree(region.graph, root).parent.items():
                edges.append((local[region.local_to_global[child]], local[region.local_to_global[parent]]))
        in_j = set(members[j])
        crossing = [(u, w) for u in members[i] for w in g_n.neighbors(u) if w in in_j]
        u, w = crossing[int(self.rng.integers(len(crossing)))]
        edges.append((local[u], local[w]))
        return Graph.from_edges(len(local_to_global), edges), local_to_global


def _merge_pass(
    g_n: Graph,
    sources: Sequence[int],
    partition: Partition,
    cfg: MsepConfig,
    build: PairGraphBuilder,
    log: LogProvider,
) -> Optional[Tuple[List[int], Dict[str, Any]]]:
    """First adjacent region pair (ascending (i, j)) whose TSE pair is closer than tau, merged"""
    for i, j in partition.adjacent_region_pairs(g_n):
        joined, local_to_global = build(g_n, partition, i, j)
        estimate = tse(joined)
        pair = [local_to_global[v] for v in estimate.nodes]
        distance = _hop_distance(joined, estimate.nodes[0], estimate.nodes[1])
        if distance >= cfg.tau:
            continue
        # the pair member inside A_i becomes s_i
        in_i = [v for v in pair if partition.region_of[v] == i]
        u = in_i[0] if in_i else pair[0]
        merged = list(sources)
        merged[i] = u
        del merged[j]
        entry = {"k": len(sources), "regions": [i, j], "pair": pair, "distance": distance}
        log.info("msep_merge", **entry)
        return merged, entry
    return None


def _msep_loop(
    g_n: Graph,
    cfg: MsepConfig,
    single: SingleEstimator,
    build: PairGraphBuilder,
    log: LogProvider,
) -> MsepResult:
    sources: List[int] = list(initial_sources(g_n, cfg, log))
    merge_log: List[Dict[str, Any]] = []
    total_iterations = 0
    stale_passes = 0
    while True:
        settled, partition, iterations = _partition_until_stable(g_n, sources, cfg, single, log)
        total_iterations += iterations
        if len(settled) == 1:
            break
        outcome = _merge_pass(g_n, settled, partition, cfg, build, log)
        if outcome is not None:
            sources, entry = outcome
            merge_log.append(entry)
            continue
        if list(settled) == sources:
            break
        sources = list(settled)
        stale_passes += 1
        if stale_passes >= cfg.max_iter:
            log.warning("msep_pass_cap", passes=stale_passes, sources=sources)
            break
    return MsepResult(
        sources=tuple(settled),
        partition=partition,
        merge_log=merge_log,
        ip_iterations=total_iterations,
    )


def msep(g_n: Graph, cfg: MsepConfig, log: Optional[LogProvider] = None) -> MsepResult:
    g_n.require_tree()
    return _msep_loop(g_n, cfg, sse_tree, _region_union, log or StructuredLog())


def msep_bfs(g_n: Graph, cfg: MsepConfig, log: Optional[LogProvider] = None) -> MsepResult:
    g_n.require_connected()
    return _msep_loop(g_n, cfg, sse_bfs, _JoinedBfsTrees(derive_seed(cfg.seed, 1)), log or StructuredLog())

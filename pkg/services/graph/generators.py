from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import networkx as nx
import numpy as np

from framework.error_code.errors import DetailedError, ErrorCode, argument_error
from services.graph.graph_core import Graph, distances_from

FAMILIES = ("regular-tree", "geometric-tree", "small-world", "random-tree")
SMALL_WORLD_TRIES = 100


@dataclass(frozen=True)
class GenParams:
    """Parameters for the synthetic network families

    ``degree``/``depth`` drive regular trees; ``d_min``/``d_max``, ``alpha``,
    ``b``, ``c`` and ``depth`` drive geometric trees (``max_degree`` optionally
    caps every node's degree); ``n``, ``k`` and ``p`` drive small-world graphs; ``n`` alone sizes a uniform random tree.
    """
    family: str = "regular-tree"
    degree: int = 3
    depth: int = 3
    d_min: int = 3
    d_max: int = 3
    max_degree: Optional[int] = None
    alpha: float = 1.0
    b: float = 1.0
    c: float = 1.0
    n: int = 0
    k: int = 4
    p: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise argument_error(f"unknown network family {self.family!r}", family=self.family)
        if self.alpha <= 0:
            raise argument_error("alpha must be positive", alpha=self.alpha)
        if self.b > self.c:
            raise argument_error("growth constants need b <= c", b=self.b, c=self.c)
        if not 0.0 <= self.p <= 1.0:
            raise argument_error("rewiring probability must lie in [0, 1]", p=self.p)
        if not 0 <= self.seed < 2 ** 64:
            raise argument_error("seed must be a 64-bit unsigned integer", seed=self.seed)


@dataclass
class GeometricAudit:
    """Per root-child level counts n(u, r) checked against round(b r^a)..round(c r^a)"""
    counts: Dict[int, List[int]] = field(default_factory=dict)
    violations: List[Tuple[int, int, int, int, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _level_bounds(alpha: float, b: float, c: float, r: int) -> Tuple[int, int]:
    scale = float(r) ** alpha
    return int(round(b * scale)), int(round(c * scale))


def generate(params: GenParams) -> Graph:
    if params.family == "regular-tree":
        return gen_regular_tree(params)
    if params.family == "geometric-tree":
        return gen_geometric_tree(params)
    if params.family == "random-tree":
        return gen_random_tree(params.n, params.seed)
    return gen_small_world(params.n, params.k, params.p, params.seed)


def regular_tree_size(degree: int, depth: int) -> int:
    if degree == 2:
        return 2 * depth + 1
    return 1 + degree * ((degree - 1) ** depth - 1) // (degree - 2)


def gen_regular_tree(params: GenParams) -> Graph:
    """Tree whose internal nodes all have ``degree`` neighbours, leaves at ``depth``"""
    degree, depth = params.degree, params.depth
    if degree < 2 or depth < 1:
        raise argument_error("regular tree needs degree >= 2 and depth >= 1", degree=degree, depth=depth)
    edges: List[Tuple[int, int]] = []
    frontier = [0]
    next_id = 1
    for level in range(depth):
        children_each = degree if level == 0 else degree - 1
        new_frontier = []
        for parent in frontier:
            for _ in range(children_each):
                edges.append((parent, next_id))
                new_frontier.append(next_id)
                next_id += 1
        frontier = new_frontier
    return Graph.from_edges(next_id, edges)


def gen_geometric_tree(params: GenParams) -> Graph:
    """Tree whose root-child subtrees grow polynomially in the distance

    For each child u of the root, the number of nodes of u's subtree at distance
    r from u is drawn uniformly from [round(b r^alpha), round(c r^alpha)] and the
    new level is attached round-robin to the previous one.
    """
    alpha, b, c, depth = params.alpha, params.b, params.c, params.depth
    if depth < 1:
        raise argument_error("geometric tree needs depth >= 1", depth=depth)
    if params.d_min < 1 or params.d_min > params.d_max:
        raise argument_error("root degree bounds need 1 <= d_min <= d_max", d_min=params.d_min, d_max=params.d_max)
    cap = params.max_degree
    if cap is not None and cap < params.d_max:
        raise argument_error("max_degree must be at least d_max", max_degree=cap, d_max=params.d_max)

    rng = np.random.default_rng(params.seed)
    root_degree = int(rng.integers(params.d_min, params.d_max + 1))
    edges: List[Tuple[int, int]] = []
    next_id = 1
    for _ in range(root_degree):
        child = next_id
        next_id += 1
        edges.append((0, child))
        previous = [child]
        for r in range(1, depth):
            lo, hi = _level_bounds(alpha, b, c, r)
            size = int(rng.integers(lo, hi + 1))
            if size == 0:
                if any(_level_bounds(alpha, b, c, later)[0] > 0 for later in range(r + 1, depth)):
                    raise DetailedError(
                        ErrorCode.GENERATION_ERROR,
                        f"level {r} drew no nodes but a later level needs parents",
                        context={'level': r, 'bounds': (lo, hi)}
                    )
                break
            if not previous:
                raise DetailedError(
                    ErrorCode.GENERATION_ERROR,
                    f"level {r} has no parents at level {r - 1}",
                    context={'level': r}
                )
            if cap is not None:
                # a level-(r-1) node already has one parent edge
                needed = -(-size // len(previous))
                if needed + 1 > cap:
                    raise DetailedError(
                        ErrorCode.GENERATION_ERROR,
                        f"level {r} needs {needed} children per parent, above max degree {cap}",
                        context={'level': r, 'size': size, 'parents': len(previous), 'max_degree': cap}
                    )
            current = []
            for i in range(size):
                edges.append((previous[i % len(previous)], next_id))
                current.append(next_id)
                next_id += 1
            previous = current

    g = Graph.from_edges(next_id, edges)
    audit = audit_geometric_tree(g, 0, alpha, b, c, depth)
    if not audit.ok:
        first = audit.violations[0]
        raise DetailedError(
            ErrorCode.GENERATION_ERROR,
            f"generated tree violates the growth condition at level {first[1]}",
            context={'violations': audit.violations[:5]}
        )
    return g


def audit_geometric_tree(g: Graph, root: int, alpha: float, b: float, c: float, depth: int) -> GeometricAudit:
    """Count n(u, r) for each neighbour u of ``root`` and flag out-of-band levels"""
    audit = GeometricAudit()
    for child in g.neighbors(root):
        dist = _distances_avoiding(g, child, root)
        counts = [0] * depth
        for d in dist.values():
            if d < depth:
                counts[d] += 1
        audit.counts[child] = counts
        for r in range(1, depth):
            lo, hi = _level_bounds(alpha, b, c, r)
            if not lo <= counts[r] <= hi:
                audit.violations.append((child, r, counts[r], lo, hi))
    return audit


def _distances_avoiding(g: Graph, start: int, blocked: int) -> Dict[int, int]:
    dist = {start: 0, blocked: -1}
    frontier = [start]
    while frontier:
        nxt = []
        for u in frontier:
            for w in g.neighbors(u):
                if w not in dist:
                    dist[w] = dist[u] + 1
                    nxt.append(w)
        frontier = nxt
    del dist[blocked]
    return dist


def gen_small_world(n: int, k: int, p: float, seed: int) -> Graph:
    """Connected Watts-Strogatz graph: ring lattice with each lattice edge rewired with probability p"""
    if k < 2 or k % 2 or k >= n:
        raise argument_error("small-world needs even k with 2 <= k < n", n=n, k=k)
    if not 0.0 <= p <= 1.0:
        raise argument_error("rewiring probability must lie in [0, 1]", p=p)
    try:
        ws = nx.connected_watts_strogatz_graph(n, k, p, tries=SMALL_WORLD_TRIES, seed=seed)
    except nx.NetworkXError as e:
        raise DetailedError(
            ErrorCode.GENERATION_ERROR,
            f"no connected small-world graph after {SMALL_WORLD_TRIES} rewirings",
            context={'n': n, 'k': k, 'p': p, 'seed': seed},
            cause=e
        )
    return Graph.from_edges(n, ws.edges())


def largest_component(g: Graph) -> List[int]:
    seen: set = set()
    best: List[int] = []
    for v in g.nodes():
        if v in seen:
            continue
        component = sorted(distances_from(g, v))
        seen.update(component)
        if len(component) > len(best):
            best = component
    return best


def gen_random_tree(n: int, seed: int) -> Graph:
    """Uniform random labelled tree on n nodes, decoded from a random Pruefer sequence"""
    if n < 1:
        raise argument_error("random tree needs at least one node", n=n)
    if n <= 2:
        return Graph.from_edges(n, [(0, 1)] if n == 2 else [])
    rng = np.random.default_rng(seed)
    code = [int(x) for x in rng.integers(0, n, size=n - 2)]
    return Graph.from_edges(n, nx.from_prufer_sequence(code).edges())

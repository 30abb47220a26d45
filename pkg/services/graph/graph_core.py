from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from framework.error_code.errors import DetailedError, ErrorCode, argument_error

NodeSet = Tuple[int, ...]


class Graph:
    """Immutable undirected simple graph over dense node ids 0..node_count-1

    Adjacency lists are sorted ascending so every traversal is deterministic.
    Instances are never mutated after construction and can be shared freely
    between worker processes.
    """

    __slots__ = ("_adjacency", "_edge_count")

    def __init__(self, adjacency: Sequence[Sequence[int]]) -> None:
        self._adjacency: Tuple[Tuple[int, ...], ...] = tuple(tuple(sorted(nbrs)) for nbrs in adjacency)
        self._edge_count = sum(len(nbrs) for nbrs in self._adjacency) // 2

    @classmethod
    def from_edges(cls, node_count: int, edges: Iterable[Tuple[int, int]]) -> "Graph":
        if node_count < 0:
            raise argument_error("node_count must be nonnegative", node_count=node_count)
        neighbor_sets: List[set] = [set() for _ in range(node_count)]
        for u, v in edges:
            if u == v:
                raise argument_error(f"self-loop at node {u}", node=u)
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise argument_error(f"edge ({u}, {v}) outside 0..{node_count - 1}", edge=(u, v))
            neighbor_sets[u].add(v)
            neighbor_sets[v].add(u)
        return cls(neighbor_sets)

    @property
    def node_count(self) -> int:
        return len(self._adjacency)

    @property
    def edge_count(self) -> int:
        return self._edge_count

    @property
    def adjacency(self) -> Tuple[Tuple[int, ...], ...]:
        return self._adjacency

    def nodes(self) -> range:
        return range(len(self._adjacency))

    def neighbors(self, v: int) -> Tuple[int, ...]:
        return self._adjacency[v]

    def degree(self, v: int) -> int:
        return len(self._adjacency[v])

    def max_degree(self) -> int:
        return max((len(nbrs) for nbrs in self._adjacency), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adjacency[u]

    def edges(self) -> Iterator[Tuple[int, int]]:
        for u, nbrs in enumerate(self._adjacency):
            for v in nbrs:
                if u < v:
                    yield (u, v)

    def check_node(self, v: int, name: str = "node") -> None:
        if not (0 <= v < len(self._adjacency)):
            raise argument_error(f"{name} {v} out of range 0..{len(self._adjacency) - 1}", **{name: v})

    def is_connected(self) -> bool:
        if self.node_count == 0:
            return True
        return len(distances_from(self, 0)) == self.node_count

    def is_tree(self) -> bool:
        return self.node_count > 0 and self._edge_count == self.node_count - 1 and self.is_connected()

    def require_tree(self) -> None:
        if not self.is_tree():
            raise DetailedError(
                ErrorCode.STRUCTURE_ERROR,
                "input is not a tree",
                context={'nodes': self.node_count, 'edges': self._edge_count}
            )

    def require_connected(self) -> None:
        if self.node_count == 0 or not self.is_connected():
            raise DetailedError(
                ErrorCode.STRUCTURE_ERROR,
                "input is not connected",
                context={'nodes': self.node_count}
            )

    def induced_subgraph(self, nodes: Iterable[int]) -> "Subgraph":
        """Subgraph induced by ``nodes`` relabelled to 0..k-1 in ascending original-id order"""
        local_to_global = sorted(set(nodes))
        for v in local_to_global:
            self.check_node(v)
        global_to_local = {g: i for i, g in enumerate(local_to_global)}
        adjacency = [
            [global_to_local[w] for w in self._adjacency[g] if w in global_to_local]
            for g in local_to_global
        ]
        return Subgraph(Graph(adjacency), tuple(local_to_global), global_to_local)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self._adjacency == other._adjacency

    def __hash__(self) -> int:
        return hash(self._adjacency)

    def __repr__(self) -> str:
        return f"Graph(nodes={self.node_count}, edges={self._edge_count})"


@dataclass(frozen=True)
class Subgraph:
    """An induced subgraph with its id translation tables"""
    graph: Graph
    local_to_global: Tuple[int, ...]
    global_to_local: Dict[int, int]

    def to_global(self, nodes: Iterable[int]) -> NodeSet:
        return tuple(self.local_to_global[v] for v in nodes)

    def to_local(self, nodes: Iterable[int]) -> NodeSet:
        return tuple(self.global_to_local[v] for v in nodes)


@dataclass(frozen=True)
class BfsTree:
    """BFS spanning tree of the root's component

    ``tree`` is labelled over ``component`` (ascending original ids), so on a
    connected graph its ids coincide with the graph's. ``order`` and ``parent``
    use original ids.
    """
    tree: Graph
    component: NodeSet
    order: NodeSet
    parent: Dict[int, int]
    root: int

    @property
    def local_root(self) -> int:
        return self.component.index(self.root)


def make_node_set(nodes: Iterable[int], g: Optional[Graph] = None) -> NodeSet:
    result = tuple(sorted(set(nodes)))
    if g is not None:
        for v in result:
            g.check_node(v)
    return result


def _parse_pairs(text: Union[bytes, str]) -> Iterator[Tuple[int, int, int]]:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2 or not all(p.isascii() and p.isdigit() for p in parts):
            raise DetailedError(
                ErrorCode.PARSE_ERROR,
                f"malformed edge at line {line_no}: {raw!r}",
                context={'line': line_no}
            )
        u, v = int(parts[0]), int(parts[1])
        if u == v:
            raise DetailedError(
                ErrorCode.PARSE_ERROR,
                f"self-loop at line {line_no}",
                context={'line': line_no, 'node': u}
            )
        yield line_no, u, v


def load_edge_list(text: Union[bytes, str]) -> Graph:
    """Parse ``<u> <v>`` lines; '#' comments and blank lines are skipped"""
    edges = [(u, v) for _, u, v in _parse_pairs(text)]
    node_count = max((max(u, v) for u, v in edges), default=-1) + 1
    return Graph.from_edges(node_count, edges)


def load_edge_list_remapped(text: Union[bytes, str]) -> Tuple[Graph, Tuple[int, ...]]:
    """Like load_edge_list but compacts sparse ids; returns (graph, dense id -> file id)"""
    edges = [(u, v) for _, u, v in _parse_pairs(text)]
    file_ids = tuple(sorted({x for e in edges for x in e}))
    dense = {x: i for i, x in enumerate(file_ids)}
    return Graph.from_edges(len(file_ids), ((dense[u], dense[v]) for u, v in edges)), file_ids


def dump_edge_list(g: Graph) -> str:
    lines = [f"{u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + ("\n" if lines else "")


def distances_from(g: Graph, root: int) -> Dict[int, int]:
    g.check_node(root, "root")
    dist = {root: 0}
    queue = deque([root])
    adjacency = g.adjacency
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for w in adjacency[u]:
            if w not in dist:
                dist[w] = du
                queue.append(w)
    return dist


def bfs_tree(g: Graph, root: int) -> BfsTree:
    g.check_node(root, "root")
    parent: Dict[int, int] = {}
    order = [root]
    seen = {root}
    queue = deque([root])
    adjacency = g.adjacency
    while queue:
        u = queue.popleft()
        for w in adjacency[u]:
            if w not in seen:
                seen.add(w)
                parent[w] = u
                order.append(w)
                queue.append(w)
    component = tuple(sorted(order))
    local = {v: i for i, v in enumerate(component)}
    tree = Graph.from_edges(len(component), ((local[c], local[p]) for c, p in parent.items()))
    return BfsTree(tree=tree, component=component, order=tuple(order), parent=parent, root=root)


def eccentricity(g: Graph, v: int) -> int:
    return max(distances_from(g, v).values())


def diameter(g: Graph) -> int:
    """Exact hop diameter; double sweep on trees, one BFS per node otherwise"""
    if g.node_count == 0:
        return 0
    if g.is_tree():
        far = distances_from(g, 0)
        a = max(far, key=lambda v: (far[v], -v))
        return eccentricity(g, a)
    return max(eccentricity(g, v) for v in g.nodes())


def path_between(g: Graph, u: int, v: int) -> NodeSet:
    """Shortest u-v path (unique on trees), u first"""
    g.check_node(u)
    g.check_node(v)
    parent = bfs_tree(g, v).parent
    if u != v and u not in parent:
        raise DetailedError(ErrorCode.STRUCTURE_ERROR, f"no path between {u} and {v}")
    path = [u]
    while path[-1] != v:
        path.append(parent[path[-1]])
    return tuple(path)

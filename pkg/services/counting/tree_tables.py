"""Log-domain infection-sequence counts on trees

``f[w][u]`` is |T_w(u)|, the size of w's side of the tree once edge (w, u) is
cut; ``log_g[w][u]`` is the log of the product of |T_v(u)| over v in T_w(u).
Both are filled for every ordered adjacent pair by one leaf-to-root and one
root-to-leaf pass.
"""
import math
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from scipy.special import gammaln, logsumexp

from framework.error_code.errors import argument_error
from services.counting.sequences import LogCount
from services.graph.graph_core import Graph, path_between


@dataclass
class SubtreeTable:
    n: int
    root: int
    f: Dict[int, Dict[int, int]]
    log_g: Dict[int, Dict[int, float]]
    # sum over all neighbours x of w of log_g[x][w]
    log_g_around: List[float]

    def size(self, w: int, u: int) -> int:
        return self.f[w][u]

    def path_node_size(self, v: int, a: int, b: int) -> int:
        """|T_v(a, b)| for a node v whose path neighbours are a and b"""
        return self.n - self.f[a][v] - self.f[b][v]

    def end_node_size(self, s: int, towards: int) -> int:
        """|T_s(s, .)| for a path endpoint s whose only path neighbour is ``towards``"""
        return self.f[s][towards]

    def off_path_log_g(self, v: int, *path_neighbors: int) -> float:
        """Sum of log g_x(v) over neighbours x of v that are not on the path"""
        return self.log_g_around[v] - sum(self.log_g[x][v] for x in path_neighbors)


def tree_tables(g_n: Graph, root: int = 0) -> SubtreeTable:
    """Subtree sizes and log-products for all ordered tree edges"""
    g_n.require_tree()
    g_n.check_node(root, "root")
    n = g_n.node_count
    f: Dict[int, Dict[int, int]] = {v: {} for v in g_n.nodes()}
    log_g: Dict[int, Dict[int, float]] = {v: {} for v in g_n.nodes()}

    parent: Dict[int, Optional[int]] = {root: None}
    order = [root]
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for w in g_n.neighbors(u):
            if w not in parent:
                parent[w] = u
                order.append(w)
                queue.append(w)

    # leaves to root
    for w in reversed(order):
        p = parent[w]
        if p is None:
            continue
        size = 1
        log_prod = 0.0
        for x in g_n.neighbors(w):
            if x != p:
                size += f[x][w]
                log_prod += log_g[x][w]
        f[w][p] = size
        log_g[w][p] = math.log(size) + log_prod
        f[p][w] = n - size

    # root to leaves
    log_g_around = [0.0] * n
    for w in order:
        total = sum(log_g[x][w] for x in g_n.neighbors(w))
        log_g_around[w] = total
        for x in g_n.neighbors(w):
            if x != parent[w]:
                log_g[w][x] = math.log(f[w][x]) + total - log_g[x][w]

    return SubtreeTable(n=n, root=root, f=f, log_g=log_g, log_g_around=log_g_around)


def all_single_source_counts(table: SubtreeTable) -> List[float]:
    """log C(v, G_n) for every v: log (n-1)! minus the neighbour log-products"""
    base = float(gammaln(table.n))
    return [base - around for around in table.log_g_around]


def single_source_count(g_n: Graph, s: int, table: Optional[SubtreeTable] = None) -> LogCount:
    """C(s, G_n) = n! / prod_u |T_u(s)|, in log domain"""
    g_n.require_tree()
    g_n.check_node(s, "source")
    if table is None:
        table = tree_tables(g_n)
    return LogCount(float(gammaln(table.n)) - table.log_g_around[s])


@dataclass(frozen=True)
class PairEntry:
    """Memoised span between flanking nodes: log q, |T_rho| of the interior, off-path log g of the interior"""
    log_q: float
    t_path: int
    interior_log_g: float

    @property
    def log_t_path(self) -> float:
        return math.log(self.t_path) if self.t_path > 0 else 0.0


class PairScoreTable:
    """Memo for the two-source recursion, keyed by the canonical (min, max) flanking pair

    An entry for flanking nodes (a, b) describes the interior of the path
    between them. Entries must be created in ascending hop distance: the
    entry for (a, b) reads (u_1, b) and (a, u_{d-1}).
    """

    def __init__(self, g_n: Graph, table: Optional[SubtreeTable] = None) -> None:
        g_n.require_tree()
        self.g_n = g_n
        self.table = table if table is not None else tree_tables(g_n)
        self.entries: Dict[Tuple[int, int], PairEntry] = {}

    @staticmethod
    def key(a: int, b: int) -> Tuple[int, int]:
        return (a, b) if a < b else (b, a)

    def get(self, a: int, b: int) -> PairEntry:
        return self.entries[self.key(a, b)]

    def __contains__(self, pair: Tuple[int, int]) -> bool:
        return self.key(*pair) in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def store(self, a: int, b: int, distance: int, u1: int, ud: int, ud_prev: int) -> PairEntry:
        """Create the entry for (a, b).

        ``u1`` is a's neighbour towards b, ``ud`` is b's neighbour towards a and
        ``ud_prev`` is ud's neighbour towards a (only read when distance >= 3).
        """
        t = self.table
        if distance == 1:
            entry = PairEntry(log_q=0.0, t_path=0, interior_log_g=0.0)
        elif distance == 2:
            size = t.path_node_size(u1, a, b)
            entry = PairEntry(
                log_q=-math.log(size),
                t_path=size,
                interior_log_g=t.off_path_log_g(u1, a, b),
            )
        else:
            right = self.get(u1, b)
            left = self.get(a, ud)
            t_path = left.t_path + t.path_node_size(ud, ud_prev, b)
            entry = PairEntry(
                log_q=float(logsumexp([right.log_q, left.log_q])) - math.log(t_path),
                t_path=t_path,
                interior_log_g=left.interior_log_g + t.off_path_log_g(ud, ud_prev, b),
            )
        self.entries[self.key(a, b)] = entry
        return entry

    def fill_path(self, path: Sequence[int]) -> PairEntry:
        """Fill every sub-span of ``path`` in ascending length; returns the full span"""
        m = len(path)
        for length in range(1, m):
            for i in range(m - length):
                j = i + length
                a, b = path[i], path[j]
                if (a, b) in self:
                    continue
                ud_prev = path[j - 2] if length >= 2 else a
                self.store(a, b, length, path[i + 1], path[j - 1], ud_prev)
        return self.get(path[0], path[-1])

    def off_path_log_g(self, a: int, b: int, u1: int, ud: int) -> float:
        """log g(a, b): all off-path log-products of the a..b path"""
        t = self.table
        return (
            self.get(a, b).interior_log_g
            + t.off_path_log_g(a, u1)
            + t.off_path_log_g(b, ud)
        )

    def log_pair_count(self, a: int, b: int, u1: int, ud: int) -> float:
        """log C(a, b) = log (n-2)! + log q - log g(a, b), for an already stored span"""
        return float(gammaln(self.table.n - 1)) + self.get(a, b).log_q - self.off_path_log_g(a, b, u1, ud)


def pair_count(g_n: Graph, s1: int, s2: int, memo: Optional[PairScoreTable] = None) -> LogCount:
    """log C({s1, s2}, G_n) via the q recursion"""
    if s1 == s2:
        raise argument_error("the two sources must differ", source=s1)
    g_n.check_node(s1, "source")
    g_n.check_node(s2, "source")
    if memo is None:
        memo = PairScoreTable(g_n)
    path = path_between(g_n, s1, s2)
    memo.fill_path(path)
    return LogCount(memo.log_pair_count(s1, s2, path[1], path[-2]))


def descending_prefix_sums(subtree_sizes: Sequence[int]) -> List[int]:
    """I*_1..I*_p: cumulative sizes of the biggest subtrees first"""
    if not subtree_sizes:
        raise argument_error("at least one subtree size is required")
    if any(size <= 0 for size in subtree_sizes):
        raise argument_error("subtree sizes must be positive", sizes=list(subtree_sizes))
    sums = []
    running = 0
    for size in sorted(subtree_sizes, reverse=True):
        running += size
        sums.append(running)
    return sums


def prefix_sums(subtree_sizes: Sequence[int]) -> List[int]:
    """I_1..I_p for a given reverse infection sequence order"""
    sums = []
    running = 0
    for size in subtree_sizes:
        running += size
        sums.append(running)
    return sums

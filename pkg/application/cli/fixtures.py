"""Built-in instances for the oracle self-checks"""
from fractions import Fraction
from typing import Tuple

from services.graph.graph_core import Graph

# two-source example graph: s1=0, s2=1, u1=2, u2=3, u3=4, u4=5, u5=6
EXAMPLE_NODES = {"s1": 0, "s2": 1, "u1": 2, "u2": 3, "u3": 4, "u4": 5, "u5": 6}
EXAMPLE_SOURCES: Tuple[int, int] = (0, 1)
EXAMPLE_SEQUENCE: Tuple[int, int] = (3, 5)
EXAMPLE_PROBABILITY = Fraction(1, 8)

# reverse infection sequence (u2, u1, u3) with |T_u2| = 1, |T_u1| = 3, |T_u3| = 2
REVERSE_SUBTREE_SIZES: Tuple[int, ...] = (1, 3, 2)
REVERSE_PREFIX_SUMS: Tuple[int, ...] = (1, 4, 6)


def two_source_example() -> Graph:
    n = EXAMPLE_NODES
    return Graph.from_edges(7, [
        (n["s1"], n["u2"]),
        (n["s1"], n["u3"]),
        (n["s2"], n["u2"]),
        (n["s2"], n["u5"]),
        (n["u2"], n["u4"]),
        (n["u2"], n["u1"]),
    ])


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star_graph(leaves: int) -> Graph:
    """Center 0 with leaves 1..leaves"""
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def p4() -> Graph:
    return path_graph(4)

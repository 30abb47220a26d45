from typing import Dict, List, Sequence

from framework.error_code.errors import argument_error, structure_error
from services.graph.graph_core import Graph
from services.partition.regions import Partition


def voronoi_partition(g_n: Graph, centers: Sequence[int]) -> Partition:
    """Assign every node to its nearest center by hop distance

    Level-synchronous multi-source BFS. A node reached at level d+1 takes the
    smallest region index among its level-d neighbours, which is the smallest
    index among all centers at that distance, so equidistant nodes go to the
    center listed first and every region stays connected.
    """
    if not centers:
        raise argument_error("at least one center is required")
    for c in centers:
        g_n.check_node(c, "center")
    if len(set(centers)) != len(centers):
        raise argument_error("centers must be distinct", centers=list(centers))

    region_of: Dict[int, int] = {c: i for i, c in enumerate(centers)}
    frontier: List[int] = list(centers)
    while frontier:
        claims: Dict[int, int] = {}
        for u in frontier:
            r = region_of[u]
            for w in g_n.neighbors(u):
                if w not in region_of and (w not in claims or r < claims[w]):
                    claims[w] = r
        region_of.update(claims)
        frontier = sorted(claims)

    if len(region_of) != g_n.node_count:
        raise structure_error(
            "input is not connected",
            reached=len(region_of), nodes=g_n.node_count
        )
    return Partition(region_of=region_of, centers=tuple(centers))

from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Sequence, Tuple

from framework.error_code.errors import argument_error
from services.graph.graph_core import Graph, NodeSet


@dataclass(frozen=True)
class Partition:
    """Assignment of every infected node to the region of exactly one center

    ``centers[i]`` is the source of region ``i``; ``region_of`` maps each node
    to its region index.
    """
    region_of: Dict[int, int]
    centers: NodeSet

    @classmethod
    def from_regions(cls, regions: Sequence[Iterable[int]], centers: Sequence[int]) -> "Partition":
        if len(regions) != len(centers):
            raise argument_error("one center per region is required", regions=len(regions), centers=len(centers))
        region_of: Dict[int, int] = {}
        for index, members in enumerate(regions):
            for v in members:
                if v in region_of:
                    raise argument_error(f"node {v} assigned to two regions", node=v)
                region_of[v] = index
        return cls(region_of=region_of, centers=tuple(centers))

    @property
    def nodes(self) -> Tuple[int, ...]:
        return tuple(sorted(self.region_of))

    def regions(self) -> List[List[int]]:
        buckets: List[List[int]] = [[] for _ in self.centers]
        for v in sorted(self.region_of):
            buckets[self.region_of[v]].append(v)
        return buckets

    def region(self, index: int) -> List[int]:
        return [v for v in sorted(self.region_of) if self.region_of[v] == index]

    def is_valid(self, g: Graph) -> bool:
        """Each center sits in its own region and each region is connected in ``g``"""
        for index, center in enumerate(self.centers):
            if self.region_of.get(center) != index:
                return False
        for index, members in enumerate(self.regions()):
            if not members:
                return False
            inside = set(members)
            seen = {members[0]}
            stack = [members[0]]
            while stack:
                u = stack.pop()
                for w in g.neighbors(u):
                    if w in inside and w not in seen:
                        seen.add(w)
                        stack.append(w)
            if seen != inside:
                return False
        return True

    def adjacent_region_pairs(self, g: Graph) -> List[Tuple[int, int]]:
        """Ascending (i, j), i < j, of regions joined by at least one edge of ``g``"""
        pairs = set()
        for u, v in g.edges():
            if u in self.region_of and v in self.region_of:
                a, b = self.region_of[u], self.region_of[v]
                if a != b:
                    pairs.add((min(a, b), max(a, b)))
        return sorted(pairs)

    def to_dict(self) -> Dict[str, Any]:
        return {"centers": list(self.centers), "regions": self.regions()}

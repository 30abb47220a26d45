import pytest

from application.cli import fixtures
from framework.error_code.errors import DetailedError, ErrorCode
from services.graph.generators import GenParams, gen_random_tree, generate
from services.graph.graph_core import Graph, distances_from
from services.partition.regions import Partition
from services.partition.voronoi import voronoi_partition


def nearest_center(g: Graph, centers) -> dict:
    tables = [distances_from(g, c) for c in centers]
    return {v: min(range(len(centers)), key=lambda i: (tables[i][v], i)) for v in g.nodes()}


class TestVoronoiPartition:

    def test_path_tie_goes_to_first_center(self):
        partition = voronoi_partition(fixtures.path_graph(5), (0, 4))

        assert partition.regions() == [[0, 1, 2], [3, 4]]

    def test_single_center_takes_everything(self):
        partition = voronoi_partition(fixtures.star_graph(4), (3,))

        assert partition.regions() == [[0, 1, 2, 3, 4]]

    def test_star_leaves(self):
        partition = voronoi_partition(fixtures.star_graph(4), (1, 2))

        assert partition.regions() == [[0, 1, 3, 4], [2]]
        assert partition.centers == (1, 2)

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_nearest_center_on_trees(self, seed):
        g = gen_random_tree(40, seed)
        centers = (5, 17, 33)

        partition = voronoi_partition(g, centers)

        assert partition.region_of == nearest_center(g, centers)
        assert partition.is_valid(g)

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_nearest_center_on_small_world(self, seed):
        g = generate(GenParams(family="small-world", n=60, k=4, p=0.1, seed=seed))
        centers = (0, 20, 40)

        partition = voronoi_partition(g, centers)

        assert partition.region_of == nearest_center(g, centers)
        assert partition.is_valid(g)

    def test_disconnected_graph_rejected(self):
        g = Graph.from_edges(4, [(0, 1), (2, 3)])

        with pytest.raises(DetailedError) as exc_info:
            voronoi_partition(g, (0,))

        assert exc_info.value.code == ErrorCode.STRUCTURE_ERROR

    @pytest.mark.parametrize("centers", [(), (1, 1), (9,)])
    def test_bad_centers(self, centers):
        with pytest.raises(DetailedError):
            voronoi_partition(fixtures.p4(), centers)


class TestPartition:

    def test_from_regions(self):
        partition = Partition.from_regions([[0, 1], [2, 3]], (0, 3))

        assert partition.region_of == {0: 0, 1: 0, 2: 1, 3: 1}
        assert partition.adjacent_region_pairs(fixtures.p4()) == [(0, 1)]

    def test_node_in_two_regions_rejected(self):
        with pytest.raises(DetailedError):
            Partition.from_regions([[0, 1], [1, 2]], (0, 2))

    def test_center_outside_its_region_is_invalid(self):
        partition = Partition(region_of={0: 1, 1: 0, 2: 1, 3: 1}, centers=(0, 3))

        assert not partition.is_valid(fixtures.p4())

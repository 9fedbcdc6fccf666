"""
tests/unit/test_coloring_core.py - properness checks, list derivation and greedy extension
"""
import random

import pytest

from app.services.coloring_core import (
    ColoringError,
    PartialTotalColoring,
    check_total_coloring,
    derive_lists,
    greedy_extend,
    item_label,
    item_order,
    parse_precoloring,
    serialize_precoloring,
)
from app.services.planar_core import GraphFileError
from app.services.sharpness import gen_example
from tests.fixtures.graphs import random_planar_embedding, random_proper_precoloring


@pytest.fixture
def k3_rotation_coloring():
    """K3 的頂點 1,2,3，每條邊塗上對面頂點的顏色"""
    return PartialTotalColoring(3, {0: 1, 1: 2, 2: 3}, {(1, 2): 1, (0, 2): 2, (0, 1): 3})


class TestPrecoloringFile:
    def test_parse(self):
        c = parse_precoloring("palette 5\nvcolor 1 1  # b\necolor 2 1 3\n")
        assert c.k == 5
        assert c.vertex_colors == {1: 1}
        assert c.edge_colors == {(1, 2): 3}

    def test_round_trip(self, k3_rotation_coloring):
        c = parse_precoloring(serialize_precoloring(k3_rotation_coloring))
        assert c == k3_rotation_coloring

    def test_missing_palette(self):
        with pytest.raises(GraphFileError):
            parse_precoloring("vcolor 0 1\n")

    def test_duplicate_vertex(self):
        with pytest.raises(GraphFileError) as exc:
            parse_precoloring("palette 3\nvcolor 0 1\nvcolor 0 2\n")
        assert exc.value.line == 3

    def test_duplicate_edge_in_either_orientation(self):
        with pytest.raises(GraphFileError):
            parse_precoloring("palette 3\necolor 0 1 1\necolor 1 0 2\n")

    def test_color_zero_rejected(self):
        with pytest.raises(GraphFileError):
            parse_precoloring("palette 3\nvcolor 0 0\n")


class TestCheckTotalColoring:
    def test_k3_total_proper(self, k3, k3_rotation_coloring):
        verdict = check_total_coloring(k3, k3_rotation_coloring, "total")
        assert verdict.proper
        assert verdict.violations == []

    def test_in_g_catches_adjacent_vertices_outside_h(self, path2):
        """兩個相鄰頂點同色、H 不含那條邊：of-H 合法，of-H-in-G 不合法"""
        c = PartialTotalColoring(3, {0: 1, 1: 1})
        assert check_total_coloring(path2, c, "of-H").proper
        verdict = check_total_coloring(path2, c, "of-H-in-G")
        assert not verdict.proper
        assert verdict.violations[0].kind == "vertex-vertex"
        assert verdict.violations[0].items == ["v0", "v1"]
        assert verdict.violations[0].color == 1

    def test_edge_vertex_violation(self, path2):
        c = PartialTotalColoring(3, {0: 2}, {(0, 1): 2})
        verdict = check_total_coloring(path2, c, "of-H")
        assert [v.kind for v in verdict.violations] == ["edge-vertex"]

    def test_edge_edge_violation(self, path3):
        c = PartialTotalColoring(3, {}, {(0, 1): 1, (1, 2): 1})
        verdict = check_total_coloring(path3, c, "of-H")
        assert [v.kind for v in verdict.violations] == ["edge-edge"]

    def test_total_mode_reports_uncolored(self, path2):
        verdict = check_total_coloring(path2, PartialTotalColoring(3, {0: 1}), "total")
        assert [v.items for v in verdict.violations] == [["v1"], ["e0-1"]]

    def test_color_out_of_range(self, path2):
        with pytest.raises(ColoringError):
            check_total_coloring(path2, PartialTotalColoring(2, {0: 3}), "of-H")

    def test_item_not_in_graph(self, path2):
        with pytest.raises(ColoringError):
            check_total_coloring(path2, PartialTotalColoring(2, {5: 1}), "of-H")

    def test_greedy_tree_precoloring_is_proper_in_g(self):
        example = gen_example("greedy-tree", 3)
        assert check_total_coloring(example.embedding, example.precoloring, "of-H-in-G").proper


class TestDeriveLists:
    def test_path_with_precolored_edge(self, path3):
        """路徑 a–b–c，H = bc，φ(b)=1、φ(c)=2、φ(bc)=3"""
        c = PartialTotalColoring(5, {1: 1, 2: 2}, {(1, 2): 3})
        lists = derive_lists(path3, c)
        assert lists.get(0) == {2, 3, 4, 5}
        assert lists.get((0, 1)) == {2, 4, 5}
        assert lists.items() == [0, (0, 1)]

    def test_empty_precoloring_gives_full_palette(self, k4):
        lists = derive_lists(k4, PartialTotalColoring(4))
        assert len(lists.items()) == 10
        assert all(lists.get(x) == {1, 2, 3, 4} for x in lists.items())

    def test_subdivided_star_lists(self):
        """t=4、k=6：1 與 2 對 v 與每條 vxᵢ 都被禁止"""
        example = gen_example("subdivided-star", 4)
        lists = derive_lists(example.embedding, example.precoloring)
        assert lists.get(0) == {3, 4, 5, 6}
        for i in range(1, 5):
            assert lists.get((0, i)) == {3, 4, 5, 6}

    def test_improper_input_rejected(self, path2):
        with pytest.raises(ColoringError):
            derive_lists(path2, PartialTotalColoring(3, {0: 1, 1: 1}))

    def test_list_size_lower_bound(self):
        """每個清單至少 k − 2Δ 色"""
        rng = random.Random(3)
        for _ in range(40):
            emb = random_planar_embedding(rng, rng.randint(2, 10))
            k = 2 * emb.max_degree + rng.randint(1, 3)
            lists = derive_lists(emb, random_proper_precoloring(rng, emb, k))
            for x in lists.items():
                assert len(lists.get(x)) >= k - 2 * emb.max_degree


class TestGreedyExtend:
    def test_greedy_tree_at_2_delta_plus_1(self):
        example = gen_example("greedy-tree", 3)
        outcome = greedy_extend(example.embedding, example.precoloring.with_palette(7))
        assert outcome.complete
        assert check_total_coloring(example.embedding, outcome.coloring, "total").proper

    def test_greedy_tree_at_2k_gets_stuck_at_center_edge(self):
        example = gen_example("greedy-tree", 3)
        outcome = greedy_extend(example.embedding, example.precoloring)
        assert not outcome.complete
        assert outcome.stuck == (0, 3)

    def test_k3_uncolored(self, k3):
        outcome = greedy_extend(k3, PartialTotalColoring(7))
        assert outcome.complete
        assert check_total_coloring(k3, outcome.coloring, "total").proper

    def test_deterministic(self, k4):
        first = greedy_extend(k4, PartialTotalColoring(7))
        second = greedy_extend(k4, PartialTotalColoring(7))
        assert first.coloring == second.coloring

    def test_input_not_modified(self, path2):
        c = PartialTotalColoring(3, {0: 1})
        greedy_extend(path2, c)
        assert c.vertex_colors == {0: 1}
        assert c.edge_colors == {}


class TestItems:
    def test_item_order_vertices_then_edges(self, path3):
        assert item_order(path3) == [0, 1, 2, (0, 1), (1, 2)]

    def test_item_label(self):
        assert item_label(3) == "v3"
        assert item_label((1, 4)) == "e1-4"

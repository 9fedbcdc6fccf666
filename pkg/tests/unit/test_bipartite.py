"""
tests/unit/test_bipartite.py - even cycles, list edge coloring and the two-phase pipeline
"""
import random

import pytest

from app.services.bipartite import (
    ListColoringImpossible,
    bipartite_extension,
    bipartite_list_edge_color,
    bipartite_total_pipeline,
    color_even_cycle_from_2_lists,
    konig_edge_coloring,
    planar_bipartite_vertex_3list,
    shrink_edge_lists,
)
from app.services.coloring_core import ListAssignment, PartialTotalColoring, check_total_coloring
from app.services.solver import PreconditionError
from tests.fixtures.graphs import random_bipartite_planar_embedding

C4_EDGES = [(0, 1), (1, 2), (2, 3), (3, 0)]


def _cycle(n):
    return [(i, (i + 1) % n) for i in range(n)]


def _proper_edge_coloring(colors):
    by_vertex = {}
    for (x, y), c in colors.items():
        for v in (x, y):
            if c in by_vertex.setdefault(v, set()):
                return False
            by_vertex[v].add(c)
    return True


class TestEvenCycle:
    def test_identical_lists_alternate(self):
        colors = color_even_cycle_from_2_lists(C4_EDGES, [{1, 2}] * 4)
        assert colors == {(0, 1): 1, (1, 2): 2, (2, 3): 1, (0, 3): 2}

    def test_mixed_lists(self):
        """差異處之後的邊先取前一條邊沒有的顏色"""
        colors = color_even_cycle_from_2_lists(C4_EDGES, [{1, 2}, {2, 3}, {1, 3}, {1, 2}])
        assert colors == {(0, 1): 1, (1, 2): 3, (2, 3): 1, (0, 3): 2}

    def test_odd_cycle_identical_lists_impossible(self):
        with pytest.raises(ListColoringImpossible) as exc:
            color_even_cycle_from_2_lists(_cycle(3), [{1, 2}] * 3)
        assert "奇圈" in exc.value.proof

    def test_odd_cycle_with_distinct_lists_succeeds(self):
        colors = color_even_cycle_from_2_lists(_cycle(5), [{1, 2}, {1, 2}, {1, 2}, {1, 2}, {2, 3}])
        assert _proper_edge_coloring(colors)

    def test_not_a_cycle(self):
        with pytest.raises(PreconditionError):
            color_even_cycle_from_2_lists([(0, 1), (2, 3), (3, 0)], [{1, 2}] * 3)

    def test_list_size_must_be_two(self):
        with pytest.raises(PreconditionError):
            color_even_cycle_from_2_lists(C4_EDGES, [{1, 2, 3}, {1, 2}, {1, 2}, {1, 2}])

    @pytest.mark.parametrize("n", [4, 6, 8, 10, 12])
    def test_random_lists_on_even_cycles(self, n):
        rng = random.Random(n)
        for _ in range(50):
            lists = [set(rng.sample(range(1, 5), 2)) for _ in range(n)]
            colors = color_even_cycle_from_2_lists(_cycle(n), lists)
            assert _proper_edge_coloring(colors)
            for i, e in enumerate(_cycle(n)):
                assert colors[tuple(sorted(e))] in lists[i]


class TestBipartiteListEdgeColor:
    def test_konig_on_c4(self):
        colors = konig_edge_coloring(sorted([(0, 1), (1, 2), (2, 3), (0, 3)]))
        assert colors == {(0, 1): 1, (0, 3): 2, (1, 2): 2, (2, 3): 1}

    def test_konig_uses_delta_colors(self):
        rng = random.Random(2)
        for _ in range(20):
            emb = random_bipartite_planar_embedding(rng, rng.randint(2, 14))
            colors = konig_edge_coloring(list(emb.edges))
            assert _proper_edge_coloring(colors)
            assert max(colors.values()) <= emb.max_degree

    def test_kernel_method_on_c4(self):
        result = bipartite_list_edge_color(C4_EDGES, {e: {1, 2} for e in C4_EDGES})
        assert result.method == "kernel"
        assert _proper_edge_coloring(result.colors)

    def test_random_lists_meet_degree_bound(self):
        rng = random.Random(8)
        for _ in range(30):
            emb = random_bipartite_planar_embedding(rng, rng.randint(2, 12))
            lists = {
                (x, y): set(rng.sample(range(1, 2 * emb.max_degree + 2), max(emb.degree(x), emb.degree(y))))
                for x, y in emb.edges
            }
            result = bipartite_list_edge_color(emb.edges, lists)
            assert _proper_edge_coloring(result.colors)
            assert all(result.colors[e] in lists[e] for e in emb.edges)

    def test_short_list_rejected(self):
        lists = {e: {1, 2} for e in C4_EDGES}
        lists[(0, 1)] = {1}
        with pytest.raises(PreconditionError):
            bipartite_list_edge_color(C4_EDGES, lists)

    def test_odd_cycle_rejected(self):
        with pytest.raises(PreconditionError):
            bipartite_list_edge_color(_cycle(3), {e: {1, 2} for e in _cycle(3)})

    def test_empty_edge_set(self):
        assert bipartite_list_edge_color([], {}).colors == {}


class TestPipeline:
    def test_vertex_3list(self, c4):
        colors = planar_bipartite_vertex_3list(c4, {v: {1, 2, 3} for v in range(4)})
        assert all(colors[u] != colors[v] for u, v in c4.edges)

    def test_vertex_list_too_short(self, c4):
        with pytest.raises(PreconditionError):
            planar_bipartite_vertex_3list(c4, {v: {1, 2} for v in range(4)})

    def test_non_bipartite_rejected(self, k3):
        with pytest.raises(PreconditionError):
            planar_bipartite_vertex_3list(k3, {v: {1, 2, 3} for v in range(3)})

    def test_shrink_edge_lists(self):
        """每條邊扣掉兩端點的顏色"""
        shrunk = shrink_edge_lists({(0, 1): {1, 2, 3, 4}}, {0: 1, 1: 4})
        assert shrunk == {(0, 1): frozenset({2, 3})}

    def test_pipeline_on_c4(self, c4):
        lists = ListAssignment(
            vertex_lists={v: frozenset({1, 2, 3}) for v in range(4)},
            edge_lists={e: frozenset({1, 2, 3, 4}) for e in c4.edges},
        )
        result = bipartite_total_pipeline(c4, lists)
        assert check_total_coloring(c4, result, "total").proper

    def test_pipeline_edge_list_too_short(self, c4):
        lists = ListAssignment(
            vertex_lists={v: frozenset({1, 2, 3}) for v in range(4)},
            edge_lists={e: frozenset({1, 2, 3}) for e in c4.edges},
        )
        with pytest.raises(PreconditionError):
            bipartite_total_pipeline(c4, lists)

    def test_pipeline_requires_coverage(self, c4):
        lists = ListAssignment(vertex_lists={0: frozenset({1, 2, 3})})
        with pytest.raises(PreconditionError):
            bipartite_total_pipeline(c4, lists)


class TestBipartiteExtension:
    def test_single_precolored_vertex(self, c4):
        """Δ=2、d=0：k = 6 足夠"""
        result = bipartite_extension(c4, PartialTotalColoring(6, {0: 1}), d=0)
        assert result.vertex_colors[0] == 1
        assert check_total_coloring(c4, result, "total").proper

    def test_palette_below_bound(self, c4):
        with pytest.raises(PreconditionError):
            bipartite_extension(c4, PartialTotalColoring(5, {0: 1}), d=0)

    def test_h_degree_exceeds_d(self, c4):
        c = PartialTotalColoring(7, {}, {(0, 1): 1})
        with pytest.raises(PreconditionError):
            bipartite_extension(c4, c, d=0)

    def test_precolored_edge(self, c4):
        c = PartialTotalColoring(7, {0: 1, 1: 2}, {(0, 1): 3})
        result = bipartite_extension(c4, c, d=1)
        assert result.edge_colors[(0, 1)] == 3
        assert check_total_coloring(c4, result, "total").proper

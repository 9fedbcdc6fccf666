"""
tests/unit/test_planar_core.py - rotation systems, faces, degree buckets and H shapes
"""
import random

import pytest

from app.services.planar_core import (
    EmbeddingError,
    GraphFileError,
    PlanarEmbedding,
    analyze_precolored_shape,
    classify_degrees,
    faces,
    pairwise_distance,
    parse_embedding,
    serialize_embedding,
    subgraph_from_items,
)
from tests.conftest import FIXTURES_DIR
from tests.fixtures.graphs import random_corpus


class TestParseEmbedding:
    def test_parse_k4_fixture(self):
        """K4.pg：4 個頂點、6 條邊、4 個面"""
        emb = parse_embedding((FIXTURES_DIR / "K4.pg").read_text(encoding="utf-8"))
        assert emb.n == 4
        assert len(emb.edges) == 6
        assert len(emb.faces) == 4

    def test_comments_and_blank_lines_ignored(self):
        text = "# 開頭註解\n\nplanar 1\nvertices 2  # 兩個頂點\nrot 0: 1\nrot 1: 0\n"
        emb = parse_embedding(text)
        assert emb.edges == ((0, 1),)

    def test_serialize_round_trip(self, k4):
        assert parse_embedding(serialize_embedding(k4)) == k4

    def test_missing_header_reports_line(self):
        """第一個有效行不是標頭時回報行號"""
        with pytest.raises(GraphFileError) as exc:
            parse_embedding("\nvertices 2\nrot 0: 1\nrot 1: 0\n")
        assert exc.value.line == 2

    def test_non_integer_neighbor_reports_column(self):
        with pytest.raises(GraphFileError) as exc:
            parse_embedding("planar 1\nvertices 2\nrot 0: x\nrot 1: 0\n")
        assert exc.value.line == 3
        assert exc.value.column == 8

    def test_missing_rotation_line(self):
        with pytest.raises(GraphFileError):
            parse_embedding("planar 1\nvertices 2\nrot 0: 1\n")

    def test_duplicate_rotation_line(self):
        with pytest.raises(GraphFileError):
            parse_embedding("planar 1\nvertices 2\nrot 0: 1\nrot 0: 1\nrot 1: 0\n")

    def test_unknown_keyword(self):
        with pytest.raises(GraphFileError):
            parse_embedding("planar 1\nvertices 1\nedge 0 0\n")


class TestEmbeddingInvariants:
    def test_asymmetric_rotation_rejected(self):
        with pytest.raises(EmbeddingError):
            PlanarEmbedding(((1,), ()))

    def test_self_loop_rejected(self):
        with pytest.raises(EmbeddingError):
            PlanarEmbedding(((0,),))

    def test_multi_edge_rejected(self):
        with pytest.raises(EmbeddingError):
            PlanarEmbedding(((1, 1), (0, 0)))

    def test_disconnected_rejected(self):
        with pytest.raises(EmbeddingError):
            PlanarEmbedding(((1,), (0,), (3,), (2,)))

    def test_non_planar_rotation_of_k4_rejected(self):
        """K4 的旋轉若不一致，只會走出 2 個面，Euler 檢查失敗"""
        with pytest.raises(EmbeddingError):
            PlanarEmbedding(((1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2)))

    def test_single_vertex_has_one_empty_face(self):
        emb = PlanarEmbedding(((),))
        assert len(emb.faces) == 1
        assert emb.faces[0].length == 0
        assert emb.faces_at(0) == [emb.faces[0]]


class TestFaces:
    def test_k4_faces_are_triangles(self, k4):
        assert [f.length for f in faces(k4)] == [3, 3, 3, 3]
        assert faces(k4)[0].walk == (0, 1, 3)

    def test_tree_face_counts_edges_twice(self, star3):
        """樹只有一個面，長度為 2|E|"""
        assert [f.length for f in star3.faces] == [6]

    def test_cycle_has_two_faces(self, c4):
        assert sorted(f.length for f in c4.faces) == [4, 4]

    def test_next_dart_follows_successor(self, k4):
        # 1 的旋轉 (0, 3, 2)：0 的後繼是 3
        assert k4.next_dart((0, 1)) == (1, 3)

    def test_every_dart_in_exactly_one_face(self):
        for emb in random_corpus(seed=11, count=30, max_n=15):
            darts = [d for f in emb.faces for d in f.darts]
            assert sorted(darts) == sorted(emb.darts)
            assert emb.n - len(emb.edges) + len(emb.faces) == 2


class TestClassifyDegrees:
    def test_star_buckets_and_q(self, star3):
        """K1,3：Δ=3；q = 3|E| + |V_[2,5]| = 9 + 1"""
        report = classify_degrees(star3, 5)
        assert report.delta == 3
        assert report.buckets == {1: [1, 2, 3], 3: [0]}
        assert report.q == 10

    def test_vertices_in_range(self, star3):
        report = classify_degrees(star3, 2)
        assert report.vertices_in_range(1, 1) == [1, 2, 3]
        assert report.q == 9


class TestDistanceAndShape:
    def test_pairwise_distance(self, c4):
        assert pairwise_distance(c4, 0, 2) == 2
        assert pairwise_distance(c4, 1, 1) == 0

    def test_pairwise_distance_unknown_vertex(self, c4):
        with pytest.raises(ValueError):
            pairwise_distance(c4, 0, 9)

    def test_empty_h_is_infinitely_separated(self, k4):
        shape = analyze_precolored_shape(k4, subgraph_from_items(), 3)
        assert shape.components == []
        assert shape.separation is None
        assert shape.meets_distance

    def test_triangle_is_clique_set(self, k4):
        h = subgraph_from_items(edges=[(0, 1), (1, 2), (0, 2)])
        shape = analyze_precolored_shape(k4, h, 3)
        assert shape.kind == "clique-set"
        assert shape.max_degree == 2

    def test_path_is_arbitrary(self, k4):
        h = subgraph_from_items(edges=[(0, 1), (1, 2)])
        assert analyze_precolored_shape(k4, h, 3).kind == "arbitrary"

    def test_matching_separation_on_cycle(self, c4):
        """C4 上兩個對角頂點：距離 2，未達 3"""
        h = subgraph_from_items(vertices=[0, 2])
        shape = analyze_precolored_shape(c4, h, 3)
        assert shape.kind == "matching"
        assert shape.separation == 2
        assert not shape.meets_distance

    def test_h_edge_must_exist(self, c4):
        with pytest.raises(ValueError):
            analyze_precolored_shape(c4, subgraph_from_items(edges=[(0, 2)]), 3)

    def test_random_corpus_shapes_never_fail(self):
        rng = random.Random(5)
        for emb in random_corpus(seed=5, count=20, max_n=12):
            vertices = [v for v in range(emb.n) if rng.random() < 0.3]
            shape = analyze_precolored_shape(emb, subgraph_from_items(vertices), 3)
            assert sum(len(c.vertices) for c in shape.components) == len(vertices)

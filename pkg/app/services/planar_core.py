"""
app/services/planar_core.py - 平面嵌入（旋轉系統）核心
=======================================================
以旋轉系統（每個頂點的順時針鄰點序列）表示連通的簡單平面圖。
面、度數分類、距離與「預著色子圖 H 的形狀」都從這裡推導。

面的走訪慣例（固定，確保報告可重現）：
    dart (u→v) 的下一個 dart 是 v→w，其中 w 是 v 的旋轉中 u 的後繼。

使用方法：
    emb = parse_embedding(text)
    for face in emb.faces:
        print(face.id, face.length)
"""
import logging
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional

import networkx as nx

from app.config import COMMENT_CHAR, GRAPH_FILE_HEADER
from app.schemas import DegreeClassification, PrecoloredShape, ShapeComponent

logger = logging.getLogger(__name__)

Edge = tuple[int, int]
Dart = tuple[int, int]

_TOKEN = re.compile(r"\S+")


# ============================================================
# 例外
# ============================================================

class EmbeddingError(ValueError):
    """旋轉系統不合法：非簡單、非對稱、不連通，或不是平面嵌入。"""


class GraphFileError(ValueError):
    """圖檔或預著色檔的語法錯誤，帶有行號與欄號。"""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"第 {line} 行第 {column} 欄：{message}")
        self.line = line
        self.column = column


def canonical_edge(u: int, v: int) -> Edge:
    """邊一律以 (min, max) 表示。"""
    return (u, v) if u < v else (v, u)


# ============================================================
# 面與子圖
# ============================================================

@dataclass(frozen=True)
class Face:
    """
    一個面：邊界走訪的 dart 循環序列。
    長度 ℓ(f) 是走訪長度，樹邊會被算兩次。
    """
    id: int
    darts: tuple[Dart, ...]

    @property
    def length(self) -> int:
        return len(self.darts)

    @property
    def walk(self) -> tuple[int, ...]:
        """走訪經過的頂點序列（與 darts 對齊：walk[i] 是 darts[i] 的起點）。"""
        return tuple(u for u, _ in self.darts)

    @cached_property
    def vertices(self) -> frozenset[int]:
        return frozenset(self.walk)

    @cached_property
    def edges(self) -> frozenset[Edge]:
        return frozenset(canonical_edge(u, v) for u, v in self.darts)


@dataclass(frozen=True)
class Subgraph:
    """預著色子圖 H：頂點集合與邊集合（邊皆為 canonical 形式）。"""
    vertices: frozenset[int] = frozenset()
    edges: frozenset[Edge] = frozenset()

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    @property
    def max_degree(self) -> int:
        return max((self.degree(v) for v in self.vertices), default=0)


# ============================================================
# 平面嵌入
# ============================================================

@dataclass(frozen=True)
class PlanarEmbedding:
    """
    連通簡單平面圖的旋轉系統。

    建構時即檢查所有不變量（簡單、對稱、連通、V − E + F = 2），
    之後不可變，可安全地在多個呼叫端之間共用。

    Args:
        rotations: rotations[v] 是頂點 v 的順時針鄰點序列，頂點編號為 0..n−1

    Raises:
        EmbeddingError: 任何不變量不成立
    """
    rotations: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        self._check_simple_and_symmetric()
        if not nx.is_connected(self.graph):
            raise EmbeddingError("圖不連通：只接受連通圖")
        euler = self.n - len(self.edges) + len(self.faces)
        if euler != 2:
            raise EmbeddingError(
                f"Euler 檢查失敗：V − E + F = {self.n} − {len(self.edges)} + "
                f"{len(self.faces)} = {euler} ≠ 2（不是平面旋轉系統）"
            )

    def _check_simple_and_symmetric(self):
        if self.n == 0:
            raise EmbeddingError("圖至少需要一個頂點")
        for v, rot in enumerate(self.rotations):
            seen = set()
            for u in rot:
                if not 0 <= u < self.n:
                    raise EmbeddingError(f"頂點 {v} 的旋轉包含不存在的頂點 {u}")
                if u == v:
                    raise EmbeddingError(f"頂點 {v} 有自迴圈")
                if u in seen:
                    raise EmbeddingError(f"頂點 {v} 的旋轉中 {u} 重複出現（不是簡單圖）")
                seen.add(u)
        for v, rot in enumerate(self.rotations):
            for u in rot:
                if v not in self.rotations[u]:
                    raise EmbeddingError(f"旋轉不對稱：{u} 在 {v} 的旋轉中，但 {v} 不在 {u} 的旋轉中")

    # ------------------------------------------------------------
    # 基本查詢
    # ------------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.rotations)

    def degree(self, v: int) -> int:
        return len(self.rotations[v])

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.rotations[v]

    def has_vertex(self, v: int) -> bool:
        return isinstance(v, int) and 0 <= v < self.n

    def has_edge(self, u: int, v: int) -> bool:
        return canonical_edge(u, v) in self._edge_set

    @cached_property
    def max_degree(self) -> int:
        return max(len(rot) for rot in self.rotations)

    @cached_property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(sorted({canonical_edge(u, v) for u, rot in enumerate(self.rotations) for v in rot}))

    @cached_property
    def _edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges)

    @cached_property
    def darts(self) -> tuple[Dart, ...]:
        return tuple((u, v) for u, rot in enumerate(self.rotations) for v in rot)

    @cached_property
    def graph(self) -> nx.Graph:
        """networkx 檢視；只供唯讀查詢（BFS、連通分量、二部判定）。"""
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g

    # ------------------------------------------------------------
    # 面的走訪
    # ------------------------------------------------------------

    @cached_property
    def _successor(self) -> dict[Dart, int]:
        succ = {}
        for v, rot in enumerate(self.rotations):
            for i, u in enumerate(rot):
                succ[(v, u)] = rot[(i + 1) % len(rot)]
        return succ

    def next_dart(self, dart: Dart) -> Dart:
        """(u→v) 之後的 dart：v→（v 的旋轉中 u 的後繼）。"""
        u, v = dart
        return (v, self._successor[(v, u)])

    @cached_property
    def faces(self) -> tuple[Face, ...]:
        if not self.darts:
            # 單一頂點：一個長度 0 的面
            return (Face(0, ()),)
        visited = set()
        faces = []
        for start in self.darts:
            if start in visited:
                continue
            walk = []
            dart = start
            while dart not in visited:
                visited.add(dart)
                walk.append(dart)
                dart = self.next_dart(dart)
            faces.append(Face(len(faces), tuple(walk)))
        return tuple(faces)

    @cached_property
    def _dart_face(self) -> dict[Dart, int]:
        return {dart: face.id for face in self.faces for dart in face.darts}

    def face_of_dart(self, dart: Dart) -> Face:
        return self.faces[self._dart_face[dart]]

    def faces_at(self, v: int) -> list[Face]:
        """與 v 關聯的相異面（依面編號排序）。"""
        ids = sorted({self._dart_face[(v, u)] for u in self.rotations[v]})
        if not ids and self.n == 1:
            ids = [0]
        return [self.faces[i] for i in ids]


# ============================================================
# 圖檔讀寫
# ============================================================

def _strip_comment(raw: str) -> str:
    return raw.split(COMMENT_CHAR, 1)[0]


def _parse_int(token: str, line: int, column: int, what: str) -> int:
    try:
        return int(token)
    except ValueError as e:
        raise GraphFileError(f"{what} 必須是整數，收到 {token!r}", line, column) from e


def parse_embedding(text: str) -> PlanarEmbedding:
    """
    解析圖檔文字為 PlanarEmbedding。

    格式：
        planar 1
        vertices <n>
        rot <v>: <u1> <u2> ... <uk>     # 順時針旋轉

    Raises:
        GraphFileError: 語法錯誤（附行號、欄號）
        EmbeddingError: 語法正確但不是合法的連通平面旋轉系統
    """
    header_seen = False
    n: Optional[int] = None
    rotations: dict[int, tuple[int, ...]] = {}
    last_line = 0

    for lineno, raw in enumerate(text.splitlines(), start=1):
        last_line = lineno
        body = _strip_comment(raw)
        tokens = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(body)]
        if not tokens:
            continue

        if not header_seen:
            if " ".join(t for t, _ in tokens) != GRAPH_FILE_HEADER:
                raise GraphFileError(f"第一個有效行必須是 {GRAPH_FILE_HEADER!r}", lineno, tokens[0][1])
            header_seen = True
            continue

        keyword, col = tokens[0]
        if keyword == "vertices":
            if n is not None:
                raise GraphFileError("重複的 vertices 宣告", lineno, col)
            if len(tokens) != 2:
                raise GraphFileError("vertices 後面必須恰好有一個整數", lineno, col)
            n = _parse_int(tokens[1][0], lineno, tokens[1][1], "頂點數")
            if n < 1:
                raise GraphFileError("頂點數必須至少為 1", lineno, tokens[1][1])
        elif keyword == "rot":
            if n is None:
                raise GraphFileError("rot 出現在 vertices 宣告之前", lineno, col)
            if len(tokens) < 2 or not tokens[1][0].endswith(":"):
                raise GraphFileError("rot 行格式應為 'rot <v>: <鄰點...>'", lineno, col)
            v = _parse_int(tokens[1][0][:-1], lineno, tokens[1][1], "頂點編號")
            if not 0 <= v < n:
                raise GraphFileError(f"頂點編號 {v} 超出範圍 0..{n - 1}", lineno, tokens[1][1])
            if v in rotations:
                raise GraphFileError(f"頂點 {v} 的旋轉重複定義", lineno, tokens[1][1])
            rotations[v] = tuple(_parse_int(t, lineno, c, "鄰點編號") for t, c in tokens[2:])
        else:
            raise GraphFileError(f"未知的關鍵字 {keyword!r}", lineno, col)

    if not header_seen:
        raise GraphFileError(f"缺少 {GRAPH_FILE_HEADER!r} 標頭", max(last_line, 1))
    if n is None:
        raise GraphFileError("缺少 vertices 宣告", max(last_line, 1))
    missing = [v for v in range(n) if v not in rotations]
    if missing:
        raise GraphFileError(f"以下頂點缺少 rot 行：{missing}", max(last_line, 1))

    emb = PlanarEmbedding(tuple(rotations[v] for v in range(n)))
    logger.debug(f"解析圖檔完成：V={emb.n}, E={len(emb.edges)}, F={len(emb.faces)}")
    return emb


def serialize_embedding(emb: PlanarEmbedding) -> str:
    """PlanarEmbedding → 圖檔文字（parse_embedding 的反向操作）。"""
    lines = [GRAPH_FILE_HEADER, f"vertices {emb.n}"]
    for v, rot in enumerate(emb.rotations):
        lines.append(f"rot {v}: {' '.join(str(u) for u in rot)}".rstrip())
    return "\n".join(lines) + "\n"


# ============================================================
# 度數與距離
# ============================================================

def faces(emb: PlanarEmbedding) -> list[Face]:
    """所有面，依第一次走訪到的順序編號。"""
    return list(emb.faces)


def classify_degrees(emb: PlanarEmbedding, range_bound: int) -> DegreeClassification:
    """
    依度數分桶，並計算 q = 3|E| + |V_[2,b]|（b = range_bound）。
    """
    buckets: dict[int, list[int]] = {}
    for v in range(emb.n):
        buckets.setdefault(emb.degree(v), []).append(v)
    mid_range = sum(len(vs) for deg, vs in buckets.items() if 2 <= deg <= range_bound)
    return DegreeClassification(
        delta=emb.max_degree,
        buckets={deg: buckets[deg] for deg in sorted(buckets)},
        range_bound=range_bound,
        q=3 * len(emb.edges) + mid_range,
    )


def _require_vertex(emb: PlanarEmbedding, v: int):
    if not emb.has_vertex(v):
        raise ValueError(f"未知的頂點編號：{v}")


def pairwise_distance(emb: PlanarEmbedding, u: int, v: int) -> int:
    """u 與 v 的最短路徑邊數（BFS）。"""
    _require_vertex(emb, u)
    _require_vertex(emb, v)
    return nx.shortest_path_length(emb.graph, u, v)


def _components_separation(emb: PlanarEmbedding, components: list[list[int]]) -> Optional[int]:
    """任兩個相異分量之間的最小距離；少於兩個分量時回傳 None（代表 +∞）。"""
    if len(components) < 2:
        return None
    owner = {v: i for i, comp in enumerate(components) for v in comp}
    best: Optional[int] = None
    for i, comp in enumerate(components):
        lengths = nx.multi_source_dijkstra_path_length(emb.graph, set(comp))
        for w, dist in lengths.items():
            j = owner.get(w)
            if j is not None and j != i and (best is None or dist < best):
                best = dist
    return best


def analyze_precolored_shape(emb: PlanarEmbedding, h: Subgraph, distance: int) -> PrecoloredShape:
    """
    分析預著色子圖 H 的形狀：分量、種類（matching / clique-set / arbitrary）與分隔距離。

    Args:
        emb: 平面嵌入
        h: 預著色子圖
        distance: 要求的最小分隔距離 ℓ

    Raises:
        ValueError: H 的頂點或邊不在圖中，或邊的端點不在 H 的頂點集合內
    """
    for v in h.vertices:
        _require_vertex(emb, v)
    for u, v in h.edges:
        if not emb.has_edge(u, v):
            raise ValueError(f"H 的邊 ({u},{v}) 不是圖的邊")
        if u not in h.vertices or v not in h.vertices:
            raise ValueError(f"H 的邊 ({u},{v}) 有端點不在 H 的頂點集合內")

    hg = nx.Graph()
    hg.add_nodes_from(h.vertices)
    hg.add_edges_from(h.edges)
    components = sorted((sorted(c) for c in nx.connected_components(hg)), key=lambda c: c[0])

    parts = []
    all_cliques = True
    for comp in components:
        comp_edges = sorted(e for e in h.edges if e[0] in comp)
        size = len(comp)
        if len(comp_edges) != size * (size - 1) // 2:
            all_cliques = False
        parts.append(ShapeComponent(vertices=comp, edges=comp_edges))

    if all(len(c) <= 2 for c in components):
        kind = "matching"
    elif all_cliques:
        kind = "clique-set"
    else:
        kind = "arbitrary"

    separation = _components_separation(emb, components)
    return PrecoloredShape(
        components=parts,
        kind=kind,
        separation=separation,
        required_distance=distance,
        meets_distance=separation is None or separation >= distance,
        max_degree=h.max_degree,
    )


def subgraph_from_items(vertices: Iterable[int] = (), edges: Iterable[Edge] = ()) -> Subgraph:
    """由頂點與邊建立 H；邊的端點自動加入頂點集合。"""
    edge_set = frozenset(canonical_edge(u, v) for u, v in edges)
    vertex_set = set(vertices)
    for u, v in edge_set:
        vertex_set.update((u, v))
    return Subgraph(frozenset(vertex_set), edge_set)

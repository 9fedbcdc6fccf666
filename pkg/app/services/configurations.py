"""
app/services/configurations.py - 預著色團的組態分析
====================================================
對每個預著色團 Hᵢ 計算：
    - 組態 𝒞(Hᵢ) = G[N[Hᵢ]] 的頂點集合與其中的高頂點
    - poor（至多一個高頂點）或 rich
    - 度數簽名（例如 "(2,2,h)"）與 16 種貧組態目錄的編號
    - 分數 s(Hᵢ)
    - helpful face（poor 且 |Hᵢ| ≥ 2）

另外提供 needy face（規則 T 使用）與 F̃ᵢ 分桶（規則 S 使用）。
"""
import logging
from collections import defaultdict
from typing import Optional

import networkx as nx

from app.config import CONFIGURATION_DISTANCE
from app.schemas import (
    ConfigReport,
    HelpfulFaceReport,
    InstanceParams,
    NeedyFace,
    NeedyReport,
    NeedyVertex,
    PredicateStatus,
)
from app.services.planar_core import Face, PlanarEmbedding, Subgraph, analyze_precolored_shape

logger = logging.getLogger(__name__)


class HypothesisError(ValueError):
    """H 不符合規則系統的假設（非團集合、距離不足、非匹配、最大度超過 d）。"""


# ============================================================
# 貧組態目錄
# ============================================================

# (度數簽名, 含 Hᵢ 預著色邊的 3-面數上限) → 目錄編號
# 不含 "(1)"：低度數的單點團，唯一的鄰點是高頂點。它是 poor，catalogue_shape 對它回傳 None，
# score-bound 述詞仍以 POOR_SCORE_BOUNDS[1] 檢查它的分數。
POOR_CATALOGUE: dict[tuple[str, int], int] = {
    ("(h)", 0): 1,
    ("(1,2)", 0): 2,
    ("(1,h)", 0): 3,
    ("(2,2)", 1): 4,
    ("(2,2)", 0): 5,
    ("(2,2,h)", 1): 6,
    ("(2,2,h)", 0): 7,
    ("(2,2,3)", 1): 8,
    ("(2,3,3)", 2): 9,
    ("(2,3,3)", 1): 10,
    ("(3,3,3)", 3): 11,
    ("(3,3,3,h)", 3): 12,
    ("(3,3,3,4)", 3): 13,
    ("(3,3,4,4)", 4): 14,
    ("(3,3,4,4)", 3): 15,
    ("(3,4,4,4)", 5): 16,
}

# 貧組態分數上界（依 |Hᵢ|）與所有組態共同的上界
POOR_SCORE_BOUNDS = {1: 0, 2: 5}
POOR_SCORE_BOUND_LARGE = 6
SCORE_BOUND = 6


def signature_label(emb: PlanarEmbedding, clique: list[int], params: InstanceParams) -> str:
    """低頂點度數遞增排列，高頂點記為 h，例如 "(2,2,h)"。"""
    low = sorted(emb.degree(v) for v in clique if not params.is_high(emb.degree(v)))
    high = ["h"] * sum(1 for v in clique if params.is_high(emb.degree(v)))
    return "(" + ",".join([*(str(x) for x in low), *high]) + ")"


def catalogue_shape(label: str, triangles: int) -> Optional[int]:
    """同簽名、3-面數上限 ≥ triangles 的目錄項中取上限最小者；找不到回傳 None。"""
    candidates = [
        (bound, shape_id)
        for (sig, bound), shape_id in POOR_CATALOGUE.items()
        if sig == label and bound >= triangles
    ]
    return min(candidates)[1] if candidates else None


def _clique_triangles(emb: PlanarEmbedding, clique_edges: set) -> list[int]:
    return [f.id for f in emb.faces if f.length == 3 and f.edges & clique_edges]


# ============================================================
# 組態
# ============================================================

def require_clique_set(emb: PlanarEmbedding, h: Subgraph, distance: int = CONFIGURATION_DISTANCE):
    """確認 H 是距離 ≥ distance 的團集合，回傳形狀分析結果。"""
    shape = analyze_precolored_shape(emb, h, distance)
    if shape.kind == "arbitrary":
        raise HypothesisError("H 必須是團的集合（每個連通分量都是完全圖）")
    if not shape.meets_distance:
        raise HypothesisError(
            f"H 的分量間距離 {shape.separation} 小於 {distance}：組態可能重疊"
        )
    return shape


def configurations(emb: PlanarEmbedding, h: Subgraph, params: InstanceParams) -> list[ConfigReport]:
    """
    為 H 的每個團建立組態報告（依團的最小頂點編號排序）。

    Raises:
        HypothesisError: H 不是團集合，或分隔距離小於 3
    """
    shape = require_clique_set(emb, h)
    reports = []
    for index, component in enumerate(shape.components):
        clique = component.vertices
        clique_edges = set(component.edges)
        closed = sorted(set(clique).union(*(emb.neighbors(v) for v in clique)))
        high = [v for v in closed if params.is_high(emb.degree(v))]
        poor = len(high) <= 1
        label = signature_label(emb, clique, params)
        triangles = _clique_triangles(emb, clique_edges)
        score = sum(4 - emb.degree(v) for v in clique if 1 <= emb.degree(v) <= 3) + len(triangles)

        report = ConfigReport(
            index=index,
            clique=clique,
            closed_neighborhood=closed,
            high_vertices=high,
            degree_signature=sorted(emb.degree(v) for v in clique),
            signature_label=label,
            poor=poor,
            shape_id=catalogue_shape(label, len(triangles)) if poor else None,
            triangle_faces=triangles,
            score=score,
        )
        report.helpful_face, report.helpful_status = locate_helpful_face(emb, report, clique_edges)
        reports.append(report)

    logger.debug(f"組態分析完成：{len(reports)} 個團，其中 {sum(r.poor for r in reports)} 個 poor")
    return reports


def locate_helpful_face(
    emb: PlanarEmbedding, config: ConfigReport, clique_edges: set
) -> tuple[Optional[int], Optional[str]]:
    """
    找出 poor 組態的 helpful face；回傳 (面編號, 狀態)。
    狀態為 None 代表找到；否則說明為何不適用或不合資格。

    做法：令 v 為唯一的高頂點，C = Hᵢ − v。C 必須恰為 G − v 的一個連通分量。
    沿 v 的旋轉找到第一個「前一個鄰點不在 C、這一個在 C」的位置 i，
    dart v→rot[i] 所在的面就是由 G − C 的面延伸而來的那個面。
    """
    if not config.poor:
        return None, "rich"
    if len(config.clique) < 2:
        return None, "single-vertex"
    if len(config.high_vertices) != 1:
        return None, "no-high-vertex"

    v = config.high_vertices[0]
    rest = set(config.clique) - {v}
    g = emb.graph.copy()
    g.remove_node(v)
    if set(nx.node_connected_component(g, next(iter(rest)))) != rest:
        return None, "not-separated-by-high-vertex"

    rot = emb.neighbors(v)
    start = next((i for i in range(len(rot)) if rot[i - 1] not in rest and rot[i] in rest), None)
    if start is None:
        return None, "no-outside-neighbor"
    face = emb.face_of_dart((v, rot[start]))
    if not face.edges & clique_edges:
        return None, "no-precolored-edge"
    return face.id, None


def face_length_status(length: int, x2: int, x3: int) -> PredicateStatus:
    """ℓ(f) ≥ 4(x₂+x₃)；若只幫助一個組態則 ℓ ≥ 5（|Hᵢ|=2）或 ℓ ≥ 6（|Hᵢ|≥3）。"""
    total = x2 + x3
    if total == 0:
        return "not-applicable"
    if total == 1:
        need = 5 if x2 == 1 else 6
    else:
        need = 4 * total
    return "holds" if length >= need else "fails"


def helpful_faces(emb: PlanarEmbedding, configs: list[ConfigReport]) -> list[HelpfulFaceReport]:
    """彙整每個 helpful face 幫助的組態數（x₂、x₃）並檢查面長。"""
    helped: dict[int, list[ConfigReport]] = defaultdict(list)
    for config in configs:
        if config.helpful_face is not None:
            helped[config.helpful_face].append(config)

    reports = []
    for face_id in sorted(helped):
        group = helped[face_id]
        x2 = sum(1 for c in group if len(c.clique) == 2)
        x3 = sum(1 for c in group if len(c.clique) >= 3)
        length = emb.faces[face_id].length
        reports.append(HelpfulFaceReport(
            face=face_id,
            length=length,
            x2=x2,
            x3=x3,
            helped_configs=[c.index for c in group],
            face_length_bound=face_length_status(length, x2, x3),
        ))
    return reports


# ============================================================
# 葉與 needy face（規則 T）
# ============================================================

def leaves(emb: PlanarEmbedding) -> list[int]:
    return [v for v in range(emb.n) if emb.degree(v) == 1]


def is_low_leaf(emb: PlanarEmbedding, v: int, params: InstanceParams) -> bool:
    return emb.degree(v) == 1 and not params.is_high(emb.degree(emb.neighbors(v)[0]))


def walk_neighbors(face: Face, v: int) -> set[int]:
    """v 在面走訪中前後相鄰的頂點（v 出現多次時全部合併）。"""
    walk = face.walk
    n = len(walk)
    return {walk[(i + s) % n] for i in range(n) if walk[i] == v for s in (-1, 1)}


def needy_faces(emb: PlanarEmbedding, h: Subgraph, params: InstanceParams) -> NeedyReport:
    """
    對每個不在 H 中的高頂點 v 列出 needy face 並計算 η(v)。

    type 1：3-面，且 v 是其上唯一的高頂點
    type 2：面上至少兩片 low-leaf，其鄰點都是 v 在該面上的走訪鄰點

    Raises:
        HypothesisError: H 的最大度大於 1
    """
    if h.max_degree > 1:
        raise HypothesisError(f"needy face 分析要求 H 的最大度 ≤ 1，實際為 {h.max_degree}")

    low_leaves = [u for u in leaves(emb) if is_low_leaf(emb, u, params)]
    report = NeedyReport()
    for v in range(emb.n):
        if v in h.vertices or not params.is_high(emb.degree(v)):
            continue
        needy = []
        for face in emb.faces_at(v):
            if face.length == 3:
                if all(u == v or not params.is_high(emb.degree(u)) for u in face.vertices):
                    needy.append(NeedyFace(face=face.id, type=1))
                continue
            around = walk_neighbors(face, v)
            hanging = [u for u in low_leaves if u in face.vertices and emb.neighbors(u)[0] in around]
            if len(hanging) >= 2:
                needy.append(NeedyFace(face=face.id, type=2))
        eta = len(needy)
        report.vertices.append(NeedyVertex(
            vertex=v,
            degree=emb.degree(v),
            faces=needy,
            eta=eta,
            bound="holds" if 2 * eta <= emb.degree(v) else "fails",
        ))
    return report


# ============================================================
# F̃ᵢ（規則 S）
# ============================================================

def tilde_face_counts(emb: PlanarEmbedding) -> dict[int, list[int]]:
    """i → 恰有 i 個相異的度數 ≥ 3 頂點的面（只列出非空的桶）。"""
    buckets: dict[int, list[int]] = defaultdict(list)
    for face in emb.faces:
        buckets[sum(1 for v in face.vertices if emb.degree(v) >= 3)].append(face.id)
    return {i: buckets[i] for i in sorted(buckets)}

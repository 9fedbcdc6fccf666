"""
app/services/bipartite.py - 二部圖的建構式子程序與兩階段全著色管線
====================================================================
    - color_even_cycle_from_2_lists：偶圈的 2-清單邊著色
    - bipartite_list_edge_color：二部圖清單邊著色（核方法，失敗時退回窮舉）
    - planar_bipartite_vertex_3list：平面二部圖的 3-清單頂點著色（以精確搜尋實現）
    - bipartite_total_pipeline：先著頂點、再縮減邊清單、最後清單邊著色
    - bipartite_extension：由預著色推導清單、檢查界限後執行管線

定理保證的界限若不成立，拋出 ProofBoundError（實作錯誤），與 PreconditionError（輸入錯誤）分開。
"""
import logging
from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Iterable, Literal, Mapping, Optional, Sequence

import networkx as nx

from app.config import DEFAULT_NODE_BUDGET
from app.services.coloring_core import (
    ListAssignment,
    PartialTotalColoring,
    check_total_coloring,
    derive_lists,
    item_label,
)
from app.services.planar_core import Edge, PlanarEmbedding, canonical_edge
from app.services.solver import ListColoringSearch, PreconditionError

logger = logging.getLogger(__name__)


class ProofBoundError(RuntimeError):
    """定理保證成立的界限或可解性被違反：代表實作錯誤，而不是輸入錯誤。"""


class SearchBudgetExceeded(RuntimeError):
    """子程序在節點預算內找不到結果；絕不代表「不可能」。"""


class ListColoringImpossible(RuntimeError):
    """清單著色確定不存在（附證明文字）。"""

    def __init__(self, proof: str):
        super().__init__(proof)
        self.proof = proof


@dataclass
class EdgeListColoring:
    colors: dict[Edge, int]
    method: Literal["kernel", "exhaustive"]


# ============================================================
# 偶圈 2-清單
# ============================================================

def _check_closed_cycle(cycle: Sequence[Edge]):
    n = len(cycle)
    if n < 3:
        raise PreconditionError(f"圈至少需要 3 條邊，收到 {n} 條")
    if len(set(cycle)) != n:
        raise PreconditionError("圈的邊不可重複")
    for i in range(n):
        if not set(cycle[i]) & set(cycle[(i + 1) % n]):
            raise PreconditionError(f"第 {i} 與第 {(i + 1) % n} 條邊沒有共用端點，不構成圈")


def color_even_cycle_from_2_lists(
    cycle: Sequence[Edge], lists: Sequence[Iterable[int]]
) -> dict[Edge, int]:
    """
    圈的 2-清單邊著色。

    若有相鄰兩條邊的清單不同：在差異處選一個前一條邊沒有的顏色作為起點，
    再沿圈貪婪地避開前一條邊的顏色，最後一條邊必然有可用顏色。
    若所有清單相同：偶圈交替使用兩色；奇圈則不可能。

    Args:
        cycle: 依序排列的邊（cycle[i] 與 cycle[i+1] 共用端點，首尾相接）
        lists: 與 cycle 對齊的 2-清單

    Returns:
        邊 → 顏色

    Raises:
        PreconditionError: 不是圈，或清單大小不是 2
        ListColoringImpossible: 奇圈且所有清單相同
    """
    cycle = [canonical_edge(*e) for e in cycle]
    _check_closed_cycle(cycle)
    sets = [frozenset(cs) for cs in lists]
    if len(sets) != len(cycle):
        raise PreconditionError("清單數量必須與圈的邊數相同")
    if any(len(cs) != 2 for cs in sets):
        raise PreconditionError("每條邊的清單必須恰好有 2 個顏色")

    n = len(cycle)
    colors = [0] * n
    differing = next((i for i in range(n) if sets[i] != sets[(i + 1) % n]), None)

    if differing is None:
        a, b = sorted(sets[0])
        if n % 2:
            raise ListColoringImpossible(
                f"長度 {n} 的奇圈上所有清單皆為 {{{a},{b}}}：兩色交替在奇圈上必有相鄰兩邊同色"
            )
        return {e: (a if i % 2 == 0 else b) for i, e in enumerate(cycle)}

    seed = (differing + 1) % n
    colors[seed] = min(sets[seed] - sets[differing])
    for step in range(1, n):
        i = (seed + step) % n
        colors[i] = min(sets[i] - {colors[i - 1]})
    return dict(zip(cycle, colors))


# ============================================================
# 二部圖清單邊著色（核方法）
# ============================================================

def _bipartite_sides(g: nx.Graph) -> dict[int, int]:
    if not nx.is_bipartite(g):
        raise PreconditionError("輸入圖不是二部圖")
    return nx.bipartite.color(g)


def konig_edge_coloring(edges: Sequence[Edge]) -> dict[Edge, int]:
    """
    二部圖的 Δ-邊著色（König）：每條邊取兩端最小缺色 a、b，
    若 a ≠ b 則翻轉從 y 出發的 a/b 交錯路徑，使 a 在 y 也空出。
    """
    at: dict[int, dict[int, Edge]] = defaultdict(dict)
    colors: dict[Edge, int] = {}

    def missing(v: int) -> int:
        used = at[v]
        return next(c for c in range(1, len(used) + 2) if c not in used)

    for e in edges:
        x, y = e
        a, b = missing(x), missing(y)
        if a != b and a in at[y]:
            _flip_path(at, colors, y, a, b)
        colors[e] = a
        at[x][a] = e
        at[y][a] = e
    return colors


def _flip_path(at, colors: dict[Edge, int], start: int, a: int, b: int):
    path = []
    v, c = start, a
    while c in at[v]:
        e = at[v][c]
        path.append(e)
        v = e[0] if e[1] == v else e[1]
        c = b if c == a else a
    for e in path:
        for x in e:
            del at[x][colors[e]]
    for e in path:
        colors[e] = b if colors[e] == a else a
        for x in e:
            at[x][colors[e]] = e


def _stable_kernel(candidates: list[Edge], base: dict[Edge, int], side: dict[int, int]) -> set[Edge]:
    """
    定向後線圖的核 = 穩定匹配：A 側偏好 base 顏色大的邊並提出邀請，B 側偏好 base 顏色小的邊。
    未入選的邊在其某一端被匹配邊「吸收」。
    """
    proposals: dict[int, list[Edge]] = {}
    for e in candidates:
        a = e[0] if side[e[0]] == 0 else e[1]
        proposals.setdefault(a, []).append(e)
    for a in proposals:
        proposals[a].sort(key=lambda e: base[e], reverse=True)

    held: dict[int, Edge] = {}
    free = deque(sorted(proposals))
    cursor = {a: 0 for a in proposals}
    while free:
        a = free.popleft()
        if cursor[a] >= len(proposals[a]):
            continue
        e = proposals[a][cursor[a]]
        cursor[a] += 1
        b = e[1] if e[0] == a else e[0]
        current = held.get(b)
        if current is None or base[e] < base[current]:
            held[b] = e
            if current is not None:
                free.append(current[0] if side[current[0]] == 0 else current[1])
        else:
            free.append(a)
    return set(held.values())


def _kernel_method(edges: list[Edge], lists: dict[Edge, frozenset[int]], side: dict[int, int]) -> dict[Edge, int]:
    base = konig_edge_coloring(edges)
    colors: dict[Edge, int] = {}
    for alpha in sorted(set().union(*lists.values())):
        candidates = [e for e in edges if e not in colors and alpha in lists[e]]
        for e in _stable_kernel(candidates, base, side):
            colors[e] = alpha
    return colors


def _exhaustive_edge_coloring(edges: list[Edge], lists: dict[Edge, frozenset[int]], budget: int) -> Optional[dict[Edge, int]]:
    index = {e: i for i, e in enumerate(edges)}
    stars: dict[int, list[int]] = {}
    for e, i in index.items():
        for x in e:
            stars.setdefault(x, []).append(i)
    conflicts = [[j for x in e for j in stars[x] if j != index[e]] for e in edges]
    search = ListColoringSearch([lists[e] for e in edges], conflicts, stars.values(), budget)
    status = search.run()
    if status == "timeout":
        raise SearchBudgetExceeded(f"清單邊著色的窮舉搜尋超過預算 {budget}")
    if status == "proven-impossible":
        return None
    return {e: search.assignment[i] for i, e in enumerate(edges)}


def bipartite_list_edge_color(
    edges: Iterable[Edge],
    lists: Mapping[Edge, Iterable[int]],
    budget: int = DEFAULT_NODE_BUDGET,
) -> EdgeListColoring:
    """
    二部圖的清單邊著色：|L(xy)| ≥ max{deg(x), deg(y)} 時必定存在。

    先用核方法（König 著色 → 定向 → 逐色取穩定匹配核）；
    若仍有邊未著色，退回窮舉搜尋並以 method="exhaustive" 回報。

    Raises:
        PreconditionError: 非二部圖、清單不完整或太短
        ProofBoundError: 前置條件成立卻無解（實作錯誤）
        SearchBudgetExceeded: 窮舉搜尋超過預算
    """
    edge_list = sorted({canonical_edge(*e) for e in edges})
    if not edge_list:
        return EdgeListColoring({}, "kernel")
    lists = {canonical_edge(*e): frozenset(cs) for e, cs in lists.items()}
    g = nx.Graph(edge_list)
    side = _bipartite_sides(g)

    for e in edge_list:
        if e not in lists:
            raise PreconditionError(f"邊 {item_label(e)} 沒有清單")
        need = max(g.degree(e[0]), g.degree(e[1]))
        if len(lists[e]) < need:
            raise PreconditionError(f"邊 {item_label(e)} 的清單大小 {len(lists[e])} 小於端點最大度 {need}")

    colors = _kernel_method(edge_list, lists, side)
    if len(colors) == len(edge_list):
        return EdgeListColoring(colors, "kernel")

    logger.info(f"核方法留下 {len(edge_list) - len(colors)} 條未著色邊，改用窮舉搜尋")
    colors = _exhaustive_edge_coloring(edge_list, lists, budget)
    if colors is None:
        raise ProofBoundError("清單大小符合 max{deg(x), deg(y)}，窮舉搜尋卻證明無解")
    return EdgeListColoring(colors, "exhaustive")


# ============================================================
# 平面二部圖 3-清單頂點著色
# ============================================================

def planar_bipartite_vertex_3list(
    emb: PlanarEmbedding,
    lists: Mapping[int, Iterable[int]],
    budget: int = DEFAULT_NODE_BUDGET,
    fixed: Optional[Mapping[int, int]] = None,
) -> dict[int, int]:
    """
    平面二部圖的 3-清單頂點著色（以精確搜尋實現；存在性有定理保證）。

    Args:
        emb: 平面二部嵌入
        lists: 未固定頂點的清單（每個至少 3 色）
        budget: 節點預算
        fixed: 已固定顏色的頂點（其顏色會從鄰點清單中排除）

    Raises:
        PreconditionError: 非二部圖、清單不完整或少於 3 色
        SearchBudgetExceeded: 預算耗盡
        ProofBoundError: 搜尋證明無解（實作錯誤）
    """
    fixed = dict(fixed or {})
    _bipartite_sides(emb.graph)
    free = [v for v in range(emb.n) if v not in fixed]
    for v in free:
        if v not in lists:
            raise PreconditionError(f"頂點 {v} 沒有清單")
        if len(set(lists[v])) < 3:
            raise PreconditionError(f"頂點 {v} 的清單少於 3 色")

    index = {v: i for i, v in enumerate(free)}
    domains = [set(lists[v]) - {fixed[u] for u in emb.neighbors(v) if u in fixed} for v in free]
    conflicts = [[index[u] for u in emb.neighbors(v) if u in index] for v in free]
    search = ListColoringSearch(domains, conflicts, budget=budget)
    status = search.run()
    if status == "timeout":
        raise SearchBudgetExceeded(f"3-清單頂點著色超過預算 {budget}")
    if status == "proven-impossible":
        raise ProofBoundError("平面二部圖的 3-清單頂點著色搜尋失敗（定理保證存在）")
    return {v: search.assignment[i] for v, i in index.items()}


# ============================================================
# 兩階段管線
# ============================================================

def shrink_edge_lists(
    edge_lists: Mapping[Edge, Iterable[int]], vertex_colors: Mapping[int, int]
) -> dict[Edge, frozenset[int]]:
    """L′(xy) = L(xy) − {c(x), c(y)}：每條邊最多失去 2 色。"""
    shrunk = {}
    for (x, y), cs in edge_lists.items():
        shrunk[canonical_edge(x, y)] = frozenset(cs) - {vertex_colors.get(x), vertex_colors.get(y)}
    return shrunk


def _effective_lists(emb: PlanarEmbedding, lists: ListAssignment, fixed: PartialTotalColoring) -> ListAssignment:
    """移除已固定項目在衝突位置上使用的顏色（清單由 derive_lists 推導時不會改變）。"""
    vertex_lists = {}
    for v, cs in lists.vertex_lists.items():
        seen = {fixed.vertex_colors.get(u) for u in emb.neighbors(v)}
        seen |= {fixed.edge_colors.get(canonical_edge(v, u)) for u in emb.neighbors(v)}
        vertex_lists[v] = cs - seen
    edge_lists = {}
    for e, cs in lists.edge_lists.items():
        seen = {fixed.edge_colors.get(canonical_edge(x, u)) for x in e for u in emb.neighbors(x)}
        edge_lists[e] = cs - seen
    return ListAssignment(vertex_lists, edge_lists)


def bipartite_total_pipeline(
    emb: PlanarEmbedding,
    lists: ListAssignment,
    fixed: Optional[PartialTotalColoring] = None,
    budget: int = DEFAULT_NODE_BUDGET,
) -> PartialTotalColoring:
    """
    平面二部圖的清單全著色，分兩階段：
        1. 以 3-清單頂點著色為所有未固定頂點著色
        2. 每條邊的清單扣掉兩端點的顏色，再做清單邊著色

    前置條件（在未著色邊構成的子圖 G′ 上，deg′ 為 G′ 的度數）：
        |L(v)| ≥ 3；|L(xy)| ≥ max{deg′(x), deg′(y)} + 2

    Raises:
        PreconditionError: 非二部圖、清單未涵蓋未著色項目、清單太短
        ProofBoundError: 第二階段的縮減清單不符合 |L′(xy)| ≥ max{deg′(x), deg′(y)}
        SearchBudgetExceeded: 子程序超過預算
    """
    if fixed is None:
        palette = max(set().union(*lists.vertex_lists.values(), *lists.edge_lists.values()), default=1)
        fixed = PartialTotalColoring(palette)
    _bipartite_sides(emb.graph)
    uncolored = {x for x in [*range(emb.n), *emb.edges] if not fixed.is_colored(x)}
    if set(lists.items()) != uncolored:
        raise PreconditionError("清單必須恰好涵蓋未著色的頂點與邊")

    effective = _effective_lists(emb, lists, fixed)
    sub = nx.Graph()
    sub.add_nodes_from(range(emb.n))
    sub.add_edges_from(effective.edge_lists)
    for v, cs in effective.vertex_lists.items():
        if len(cs) < 3:
            raise PreconditionError(f"頂點 {v} 的清單只有 {len(cs)} 色，至少需要 3 色")
    for (x, y), cs in effective.edge_lists.items():
        need = max(sub.degree(x), sub.degree(y)) + 2
        if len(cs) < need:
            raise PreconditionError(f"邊 {item_label((x, y))} 的清單只有 {len(cs)} 色，至少需要 {need} 色")

    # 第一階段：頂點
    vertex_colors = planar_bipartite_vertex_3list(
        emb, effective.vertex_lists, budget, fixed=fixed.vertex_colors
    )
    all_vertex_colors = {**fixed.vertex_colors, **vertex_colors}

    # 第二階段：邊
    shrunk = shrink_edge_lists(effective.edge_lists, all_vertex_colors)
    for (x, y), cs in shrunk.items():
        need = max(sub.degree(x), sub.degree(y))
        if len(cs) < need:
            raise ProofBoundError(f"邊 {item_label((x, y))} 縮減後只剩 {len(cs)} 色，低於 {need}")
    edge_result = bipartite_list_edge_color(shrunk, shrunk, budget)
    logger.info(f"兩階段管線完成：{len(vertex_colors)} 個頂點、{len(shrunk)} 條邊（{edge_result.method}）")

    result = fixed.extended({**vertex_colors, **edge_result.colors})
    verdict = check_total_coloring(emb, result, "total")
    if not verdict.proper:
        raise ProofBoundError(f"管線輸出不是合法全著色：{verdict.violations[0].kind} {verdict.violations[0].items}")
    return result


def bipartite_extension(
    emb: PlanarEmbedding,
    c: PartialTotalColoring,
    d: int,
    budget: int = DEFAULT_NODE_BUDGET,
) -> PartialTotalColoring:
    """
    平面二部圖上，最大度 ≤ d 的預著色 H 在 k ≥ Δ+d+4 時必可延伸。

    在 G′ = G − E(H) 上推導清單，檢查證明中的界限
    （頂點清單 ≥ 4；邊清單 ≥ max{deg′(x), deg′(y)} + 2），再執行兩階段管線。
    H 的頂點顏色保持固定。

    Raises:
        ColoringError: c 不是 H in G 的合法全著色
        PreconditionError: 非二部圖、deg_H > d，或 k < Δ+d+4
        ProofBoundError: 推導出的清單不符合證明中的界限
    """
    h = c.subgraph()
    if h.max_degree > d:
        raise PreconditionError(f"H 的最大度 {h.max_degree} 超過 d = {d}")
    need_k = emb.max_degree + d + 4
    if c.k < need_k:
        raise PreconditionError(f"調色盤 k = {c.k} 小於 Δ+d+4 = {need_k}")
    _bipartite_sides(emb.graph)

    lists = derive_lists(emb, c)
    residual_degree = {v: emb.degree(v) - h.degree(v) for v in range(emb.n)}
    for v, cs in lists.vertex_lists.items():
        if len(cs) < 4:
            raise ProofBoundError(f"頂點 {v} 的推導清單只有 {len(cs)} 色，證明保證至少 4 色")
    for (x, y), cs in lists.edge_lists.items():
        need = max(residual_degree[x], residual_degree[y]) + 2
        if len(cs) < need:
            raise ProofBoundError(f"邊 {item_label((x, y))} 的推導清單只有 {len(cs)} 色，證明保證至少 {need} 色")

    return bipartite_total_pipeline(emb, lists, fixed=c, budget=budget)

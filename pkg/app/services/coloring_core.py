"""
app/services/coloring_core.py - 全著色、合法性檢查、清單推導與貪婪延伸
======================================================================
一個「項目」(item) 是頂點（int）或邊（canonical 的 (u, v)）。
項目的固定順序：先頂點（依編號），再邊（依字典序）；求解器的平手判定也使用這個順序。

延伸問題與清單著色的關係：
    預著色 c 可延伸到 G ⇔ 由 c 推導出的清單 L 允許一個清單全著色。
"""
import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from app.config import COMMENT_CHAR
from app.schemas import CheckMode, ListEntry, ListReport, Verdict, Violation
from app.services.planar_core import (
    Edge,
    GraphFileError,
    PlanarEmbedding,
    Subgraph,
    canonical_edge,
    subgraph_from_items,
)

logger = logging.getLogger(__name__)

Item = Union[int, Edge]


class ColoringError(ValueError):
    """預著色不合法：顏色超出調色盤、項目不在圖中，或本身不是 H in G 的全著色。"""


def item_label(item: Item) -> str:
    """報告用的項目名稱：頂點 "v3"、邊 "e1-4"。"""
    if isinstance(item, tuple):
        return f"e{item[0]}-{item[1]}"
    return f"v{item}"


def item_order(emb: PlanarEmbedding) -> list[Item]:
    """全部項目的固定順序：頂點在前、邊在後。"""
    return [*range(emb.n), *emb.edges]


def conflicting_items(emb: PlanarEmbedding, item: Item) -> list[Item]:
    """
    在全著色中必須與 item 異色的項目。
    頂點：相鄰頂點與關聯邊；邊：兩個端點與共用端點的其他邊。
    """
    if isinstance(item, tuple):
        u, v = item
        others = {canonical_edge(x, y) for x in (u, v) for y in emb.neighbors(x)} - {item}
        return [u, v, *sorted(others)]
    return [*emb.neighbors(item), *sorted(canonical_edge(item, u) for u in emb.neighbors(item))]


# ============================================================
# 資料型別
# ============================================================

@dataclass
class PartialTotalColoring:
    """
    調色盤大小 k 與部分的頂點／邊著色。
    邊在建構時一律轉成 canonical 形式。
    """
    k: int
    vertex_colors: dict[int, int] = field(default_factory=dict)
    edge_colors: dict[Edge, int] = field(default_factory=dict)

    def __post_init__(self):
        self.edge_colors = {canonical_edge(u, v): c for (u, v), c in self.edge_colors.items()}

    def color_of(self, item: Item) -> Optional[int]:
        if isinstance(item, tuple):
            return self.edge_colors.get(canonical_edge(*item))
        return self.vertex_colors.get(item)

    def is_colored(self, item: Item) -> bool:
        return self.color_of(item) is not None

    def colored_items(self) -> list[Item]:
        return [*sorted(self.vertex_colors), *sorted(self.edge_colors)]

    def subgraph(self) -> Subgraph:
        """預著色定義的 H：頂點 = 所有提及的頂點；邊 = 所有著色邊。"""
        return subgraph_from_items(self.vertex_colors, self.edge_colors)

    def with_palette(self, k: int) -> "PartialTotalColoring":
        return PartialTotalColoring(k, dict(self.vertex_colors), dict(self.edge_colors))

    def extended(self, assignment: dict[Item, int], k: Optional[int] = None) -> "PartialTotalColoring":
        """回傳加入 assignment 後的新著色（不修改自己）。"""
        result = PartialTotalColoring(k or self.k, dict(self.vertex_colors), dict(self.edge_colors))
        for item, color in assignment.items():
            if isinstance(item, tuple):
                result.edge_colors[canonical_edge(*item)] = color
            else:
                result.vertex_colors[item] = color
        return result


@dataclass
class ListAssignment:
    """每個未著色項目的可用顏色集合。"""
    vertex_lists: dict[int, frozenset[int]] = field(default_factory=dict)
    edge_lists: dict[Edge, frozenset[int]] = field(default_factory=dict)

    def __post_init__(self):
        self.vertex_lists = {v: frozenset(cs) for v, cs in self.vertex_lists.items()}
        self.edge_lists = {canonical_edge(u, v): frozenset(cs) for (u, v), cs in self.edge_lists.items()}

    def items(self) -> list[Item]:
        return [*sorted(self.vertex_lists), *sorted(self.edge_lists)]

    def get(self, item: Item) -> frozenset[int]:
        if isinstance(item, tuple):
            return self.edge_lists[canonical_edge(*item)]
        return self.vertex_lists[item]

    def min_size(self) -> Optional[int]:
        sizes = [len(cs) for cs in (*self.vertex_lists.values(), *self.edge_lists.values())]
        return min(sizes) if sizes else None

    def to_report(self, palette: int) -> ListReport:
        return ListReport(
            palette=palette,
            entries=[ListEntry(item=item_label(x), colors=sorted(self.get(x))) for x in self.items()],
            min_size=self.min_size(),
        )


@dataclass
class GreedyOutcome:
    """貪婪延伸的結果；stuck 是第一個找不到可用顏色的項目。"""
    coloring: PartialTotalColoring
    stuck: Optional[Item] = None

    @property
    def complete(self) -> bool:
        return self.stuck is None


# ============================================================
# 預著色檔讀寫
# ============================================================

def parse_precoloring(text: str) -> PartialTotalColoring:
    """
    解析預著色檔。

    格式：
        palette <k>
        vcolor <v> <c>
        ecolor <u> <v> <c>

    Raises:
        GraphFileError: 語法錯誤、重複項目、非正整數
    """
    k: Optional[int] = None
    vertex_colors: dict[int, int] = {}
    edge_colors: dict[Edge, int] = {}
    last_line = 0

    for lineno, raw in enumerate(text.splitlines(), start=1):
        last_line = lineno
        tokens = raw.split(COMMENT_CHAR, 1)[0].split()
        if not tokens:
            continue
        column = raw.index(tokens[0]) + 1
        try:
            numbers = [int(t) for t in tokens[1:]]
        except ValueError as e:
            raise GraphFileError(f"{tokens[0]} 的參數必須是整數", lineno, column) from e
        if any(x < 0 for x in numbers):
            raise GraphFileError("不接受負數", lineno, column)

        keyword = tokens[0]
        if keyword == "palette":
            if k is not None or len(numbers) != 1 or numbers[0] < 1:
                raise GraphFileError("palette 必須只宣告一次，且為正整數", lineno, column)
            k = numbers[0]
        elif keyword == "vcolor":
            if len(numbers) != 2 or numbers[1] < 1:
                raise GraphFileError("vcolor 格式應為 'vcolor <v> <c>'，顏色從 1 開始", lineno, column)
            v, c = numbers
            if v in vertex_colors:
                raise GraphFileError(f"頂點 {v} 重複著色", lineno, column)
            vertex_colors[v] = c
        elif keyword == "ecolor":
            if len(numbers) != 3 or numbers[2] < 1:
                raise GraphFileError("ecolor 格式應為 'ecolor <u> <v> <c>'，顏色從 1 開始", lineno, column)
            u, v, c = numbers
            e = canonical_edge(u, v)
            if e in edge_colors:
                raise GraphFileError(f"邊 ({u},{v}) 重複著色", lineno, column)
            edge_colors[e] = c
        else:
            raise GraphFileError(f"未知的關鍵字 {keyword!r}", lineno, column)

    if k is None:
        raise GraphFileError("缺少 palette 宣告", max(last_line, 1))
    return PartialTotalColoring(k, vertex_colors, edge_colors)


def serialize_precoloring(c: PartialTotalColoring) -> str:
    """PartialTotalColoring → 預著色檔文字（項目依固定順序排列）。"""
    lines = [f"palette {c.k}"]
    lines += [f"vcolor {v} {c.vertex_colors[v]}" for v in sorted(c.vertex_colors)]
    lines += [f"ecolor {u} {v} {c.edge_colors[(u, v)]}" for u, v in sorted(c.edge_colors)]
    return "\n".join(lines) + "\n"


# ============================================================
# 合法性檢查
# ============================================================

def _validate_domain(emb: PlanarEmbedding, c: PartialTotalColoring):
    for v, color in c.vertex_colors.items():
        if not emb.has_vertex(v):
            raise ColoringError(f"預著色的頂點 {v} 不在圖中")
        if not 1 <= color <= c.k:
            raise ColoringError(f"頂點 {v} 的顏色 {color} 超出調色盤 1..{c.k}")
    for (u, v), color in c.edge_colors.items():
        if not emb.has_edge(u, v):
            raise ColoringError(f"預著色的邊 ({u},{v}) 不在圖中")
        if not 1 <= color <= c.k:
            raise ColoringError(f"邊 ({u},{v}) 的顏色 {color} 超出調色盤 1..{c.k}")


def check_total_coloring(emb: PlanarEmbedding, c: PartialTotalColoring, mode: CheckMode) -> Verdict:
    """
    檢查 c 的合法性並列出所有違規。

    - of-H：只檢查已著色的子圖內部（頂點相鄰的判定只看 H 的邊）
    - of-H-in-G：另外要求在 G 中相鄰的已著色頂點顏色相異
    - total：每個項目都必須著色，且整體合法

    Raises:
        ColoringError: 顏色超出調色盤或項目不在圖中
    """
    _validate_domain(emb, c)
    violations: list[Violation] = []

    # 同一頂點上的兩條著色邊
    for v in range(emb.n):
        incident = sorted(
            canonical_edge(v, u) for u in emb.neighbors(v) if canonical_edge(v, u) in c.edge_colors
        )
        for i, e in enumerate(incident):
            for f in incident[i + 1:]:
                if c.edge_colors[e] == c.edge_colors[f]:
                    violations.append(Violation(
                        kind="edge-edge", items=[item_label(e), item_label(f)], color=c.edge_colors[e]
                    ))

    # 著色邊與其著色端點
    for e, color in sorted(c.edge_colors.items()):
        for x in e:
            if c.vertex_colors.get(x) == color:
                violations.append(Violation(
                    kind="edge-vertex", items=[item_label(e), item_label(x)], color=color
                ))

    # 相鄰的著色頂點
    for u, v in emb.edges:
        if u in c.vertex_colors and c.vertex_colors.get(u) == c.vertex_colors.get(v):
            if mode == "of-H" and (u, v) not in c.edge_colors:
                continue
            violations.append(Violation(
                kind="vertex-vertex", items=[item_label(u), item_label(v)], color=c.vertex_colors[u]
            ))

    if mode == "total":
        for item in item_order(emb):
            if not c.is_colored(item):
                violations.append(Violation(kind="uncolored", items=[item_label(item)]))

    return Verdict(mode=mode, proper=not violations, violations=violations)


def require_proper_in_g(emb: PlanarEmbedding, c: PartialTotalColoring):
    """確認 c 是 H in G 的全著色，否則拋出 ColoringError（附第一筆違規）。"""
    verdict = check_total_coloring(emb, c, "of-H-in-G")
    if not verdict.proper:
        first = verdict.violations[0]
        raise ColoringError(
            f"預著色不是 H in G 的合法全著色：{first.kind} {first.items} 顏色 {first.color}"
            f"（共 {len(verdict.violations)} 筆違規）"
        )


# ============================================================
# 清單推導與貪婪延伸
# ============================================================

def _seen_by_vertex(emb: PlanarEmbedding, c: PartialTotalColoring, v: int) -> set[int]:
    seen = set()
    for u in emb.neighbors(v):
        if u in c.vertex_colors:
            seen.add(c.vertex_colors[u])
        e = canonical_edge(u, v)
        if e in c.edge_colors:
            seen.add(c.edge_colors[e])
    return seen


def _seen_by_edge(emb: PlanarEmbedding, c: PartialTotalColoring, e: Edge) -> set[int]:
    seen = set()
    for x in e:
        if x in c.vertex_colors:
            seen.add(c.vertex_colors[x])
        for y in emb.neighbors(x):
            f = canonical_edge(x, y)
            if f != e and f in c.edge_colors:
                seen.add(c.edge_colors[f])
    return seen


def derive_lists(emb: PlanarEmbedding, c: PartialTotalColoring) -> ListAssignment:
    """
    由預著色推導每個未著色項目的清單：L(x) = {1..k} − x 看得到的顏色。

    Raises:
        ColoringError: c 不是 H in G 的合法全著色
    """
    require_proper_in_g(emb, c)
    palette = frozenset(range(1, c.k + 1))
    lists = ListAssignment(
        vertex_lists={
            v: palette - _seen_by_vertex(emb, c, v) for v in range(emb.n) if v not in c.vertex_colors
        },
        edge_lists={e: palette - _seen_by_edge(emb, c, e) for e in emb.edges if e not in c.edge_colors},
    )
    logger.debug(f"清單推導完成：{len(lists.items())} 個未著色項目，最小清單 {lists.min_size()}")
    return lists


def greedy_extend(emb: PlanarEmbedding, c: PartialTotalColoring) -> GreedyOutcome:
    """
    依固定順序（頂點、再邊）為未著色項目選最小可用顏色。
    k ≥ 2Δ+1 時保證成功；否則可能回傳第一個卡住的項目。
    """
    require_proper_in_g(emb, c)
    work = c.with_palette(c.k)

    for v in range(emb.n):
        if v in work.vertex_colors:
            continue
        color = _smallest_free(work.k, _seen_by_vertex(emb, work, v))
        if color is None:
            logger.info(f"貪婪延伸卡在 {item_label(v)}（k={c.k}）")
            return GreedyOutcome(work, stuck=v)
        work.vertex_colors[v] = color

    for e in emb.edges:
        if e in work.edge_colors:
            continue
        color = _smallest_free(work.k, _seen_by_edge(emb, work, e))
        if color is None:
            logger.info(f"貪婪延伸卡在 {item_label(e)}（k={c.k}）")
            return GreedyOutcome(work, stuck=e)
        work.edge_colors[e] = color

    return GreedyOutcome(work)


def _smallest_free(k: int, seen: Iterable[int]) -> Optional[int]:
    blocked = set(seen)
    return next((color for color in range(1, k + 1) if color not in blocked), None)

"""
app/services/solver.py - 精確的清單全著色求解器
================================================
核心是一個與圖無關的回溯搜尋引擎 ListColoringSearch：
    - 最少剩餘值（MRV）選項目，平手時取編號最小者
    - 顏色由小到大嘗試
    - 前向檢查（forward checking），以 trail 記錄刪除的值以便回溯
    - 對「兩兩衝突的項目群」做 Hall 條件過濾（alldifferent 的弧一致性）
    - 節點預算以「指派次數」計算，結果可重現

list_total_color_exact / extend_exact 把全著色問題轉成這個引擎的輸入；
bipartite.py 的二部子程序也共用同一個引擎。

使用方法：
    outcome = extend_exact(emb, coloring, budget=100_000)
    if outcome.status == "colored":
        print(serialize_precoloring(outcome.witness))
"""
import logging
import time
from collections import defaultdict, deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from app.config import DEFAULT_NODE_BUDGET, DEFAULT_PORTFOLIO_SIZE
from app.schemas import SolveReport, SolveStatus
from app.services.coloring_core import (
    Item,
    ListAssignment,
    PartialTotalColoring,
    conflicting_items,
    derive_lists,
    item_label,
    item_order,
    serialize_precoloring,
)
from app.services.planar_core import PlanarEmbedding, canonical_edge

logger = logging.getLogger(__name__)


class PreconditionError(ValueError):
    """求解器或管線的前置條件不成立（清單未涵蓋未著色項目、清單太短、非二部圖等）。"""


class _BudgetExhausted(Exception):
    pass


# ============================================================
# 搜尋引擎
# ============================================================

class ListColoringSearch:
    """
    一般的清單著色回溯搜尋。

    項目以 0..n−1 編號；衝突的兩個項目必須異色。
    cliques 是兩兩衝突的項目群，用於 Hall 過濾（只會剪掉無解的分支，不影響完整性）。

    Args:
        domains: 每個項目的可用顏色
        conflicts: conflicts[i] 是與 i 衝突的項目
        cliques: 兩兩衝突的項目群
        budget: 最多允許的指派次數
        rank: MRV 平手時的優先順序（預設為項目編號）
        hall_filtering: 是否啟用 Hall 過濾
    """

    def __init__(
        self,
        domains: Sequence[Iterable[int]],
        conflicts: Sequence[Iterable[int]],
        cliques: Iterable[Sequence[int]] = (),
        budget: int = DEFAULT_NODE_BUDGET,
        rank: Optional[Sequence[int]] = None,
        hall_filtering: bool = True,
    ):
        self.domains = [set(d) for d in domains]
        self.conflicts = [sorted(set(c)) for c in conflicts]
        self.cliques = [list(c) for c in cliques if len(c) >= 2] if hall_filtering else []
        self.cliques_of: list[list[int]] = [[] for _ in self.domains]
        for ci, clique in enumerate(self.cliques):
            for i in clique:
                self.cliques_of[i].append(ci)
        self.budget = budget
        self.rank = list(rank) if rank is not None else list(range(len(self.domains)))
        self.nodes = 0
        self.assignment: list[Optional[int]] = [None] * len(self.domains)
        self._trail: list[tuple[int, int]] = []

    def run(self) -> SolveStatus:
        if any(not d for d in self.domains):
            return "proven-impossible"
        if not self._propagate(range(len(self.cliques))):
            return "proven-impossible"
        try:
            found = self._search()
        except _BudgetExhausted:
            return "timeout"
        return "colored" if found else "proven-impossible"

    # ------------------------------------------------------------
    # 回溯
    # ------------------------------------------------------------

    def _select(self) -> Optional[int]:
        best, best_key = None, None
        for i, color in enumerate(self.assignment):
            if color is not None:
                continue
            key = (len(self.domains[i]), self.rank[i])
            if best_key is None or key < best_key:
                best, best_key = i, key
        return best

    def _search(self) -> bool:
        i = self._select()
        if i is None:
            return True
        for color in sorted(self.domains[i]):
            self.nodes += 1
            if self.nodes > self.budget:
                raise _BudgetExhausted
            mark = len(self._trail)
            self.assignment[i] = color
            if self._forward_check(i, color) and self._search():
                return True
            self.assignment[i] = None
            self._undo(mark)
        return False

    def _remove(self, i: int, color: int):
        self.domains[i].discard(color)
        self._trail.append((i, color))

    def _undo(self, mark: int):
        while len(self._trail) > mark:
            i, color = self._trail.pop()
            self.domains[i].add(color)

    def _forward_check(self, i: int, color: int) -> bool:
        touched = set(self.cliques_of[i])
        for j in self.conflicts[i]:
            if self.assignment[j] is None and color in self.domains[j]:
                self._remove(j, color)
                if not self.domains[j]:
                    return False
                touched.update(self.cliques_of[j])
        return self._propagate(sorted(touched))

    # ------------------------------------------------------------
    # Hall 過濾
    # ------------------------------------------------------------

    def _propagate(self, initial: Iterable[int]) -> bool:
        queue = deque(initial)
        queued = set(queue)
        while queue:
            ci = queue.popleft()
            queued.discard(ci)
            changed = self._filter_all_different(self.cliques[ci])
            if changed is None:
                return False
            for j in changed:
                for cj in self.cliques_of[j]:
                    if cj not in queued:
                        queue.append(cj)
                        queued.add(cj)
        return True

    def _max_matching(self, members: list[int]) -> dict[int, int]:
        """Kuhn 增廣路徑：項目 → 顏色。"""
        owner: dict[int, int] = {}

        def augment(x: int, seen: set[int]) -> bool:
            for color in sorted(self.domains[x]):
                if color in seen:
                    continue
                seen.add(color)
                if color not in owner or augment(owner[color], seen):
                    owner[color] = x
                    return True
            return False

        for x in members:
            augment(x, set())
        return {x: color for color, x in owner.items()}

    def _filter_all_different(self, clique: list[int]) -> Optional[list[int]]:
        """
        刪除不屬於任何完美匹配的 (項目, 顏色)；回傳有值被刪除的項目。
        找不到涵蓋所有項目的匹配時回傳 None（Hall 條件不成立）。
        """
        members = [i for i in clique if self.assignment[i] is None]
        if len(members) < 2:
            return []
        match = self._max_matching(members)
        if len(match) < len(members):
            return None

        owner = {color: x for x, color in match.items()}
        # a → b：擁有 a 的項目可以改用 b；這裡存反向邊 b ← a
        reverse: dict[int, list[int]] = defaultdict(list)
        for y in members:
            for b in self.domains[y]:
                if b != match[y]:
                    reverse[b].append(match[y])
        values = set().union(*(self.domains[i] for i in members))
        reaches_free = _reach_backward([c for c in values if c not in owner], reverse)

        changed = []
        for x in members:
            reaches_own: Optional[set[int]] = None
            for color in sorted(self.domains[x]):
                if color == match[x] or color in reaches_free:
                    continue
                if reaches_own is None:
                    reaches_own = _reach_backward([match[x]], reverse)
                if color not in reaches_own:
                    self._remove(x, color)
                    if not changed or changed[-1] != x:
                        changed.append(x)
        return changed


def _reach_backward(starts: Iterable[int], reverse: dict[int, list[int]]) -> set[int]:
    seen = set(starts)
    queue = deque(seen)
    while queue:
        b = queue.popleft()
        for a in reverse.get(b, ()):
            if a not in seen:
                seen.add(a)
                queue.append(a)
    return seen


# ============================================================
# 全著色介面
# ============================================================

@dataclass
class SolveOutcome:
    """一次求解的結果；status=colored 時 witness 是完整的全著色。"""
    status: SolveStatus
    witness: Optional[PartialTotalColoring] = None
    nodes: int = 0
    elapsed: float = 0.0
    method: str = "exact"
    stuck: Optional[Item] = None

    def to_report(self, source: Optional[str] = None) -> SolveReport:
        return SolveReport(
            status=self.status,
            method=self.method,
            witness=serialize_precoloring(self.witness) if self.witness is not None else None,
            stuck_item=item_label(self.stuck) if self.stuck is not None else None,
            nodes=self.nodes,
            elapsed=round(self.elapsed, 6),
            source=source,
        )


def _require_coverage(emb: PlanarEmbedding, lists: ListAssignment, fixed: PartialTotalColoring):
    uncolored = {x for x in item_order(emb) if not fixed.is_colored(x)}
    listed = set(lists.items())
    if listed != uncolored:
        missing = sorted(uncolored - listed, key=str)
        extra = sorted(listed - uncolored, key=str)
        raise PreconditionError(
            f"清單必須恰好涵蓋未著色項目：缺少 {[item_label(x) for x in missing]}，"
            f"多出 {[item_label(x) for x in extra]}"
        )


def build_total_search(
    emb: PlanarEmbedding,
    lists: ListAssignment,
    fixed: PartialTotalColoring,
    budget: int = DEFAULT_NODE_BUDGET,
    rank: Optional[Sequence[int]] = None,
    hall_filtering: bool = True,
) -> tuple[list[Item], ListColoringSearch]:
    """把清單全著色問題轉成搜尋引擎的輸入；回傳 (項目序列, 引擎)。"""
    items = lists.items()
    index = {x: i for i, x in enumerate(items)}
    domains, conflicts = [], []
    for x in items:
        blocked = set()
        neighbors = []
        for y in conflicting_items(emb, x):
            color = fixed.color_of(y)
            if color is not None:
                blocked.add(color)
            elif y in index:
                neighbors.append(index[y])
        domains.append(set(lists.get(x)) - blocked)
        conflicts.append(neighbors)

    # 每個頂點的「星團」：頂點本身與其未著色關聯邊
    cliques = []
    for v in range(emb.n):
        star = [index[canonical_edge(v, u)] for u in emb.neighbors(v) if canonical_edge(v, u) in index]
        if v in index:
            star.insert(0, index[v])
        cliques.append(star)

    return items, ListColoringSearch(domains, conflicts, cliques, budget, rank, hall_filtering)


def list_total_color_exact(
    emb: PlanarEmbedding,
    lists: ListAssignment,
    fixed: PartialTotalColoring,
    budget: int = DEFAULT_NODE_BUDGET,
    rank: Optional[Sequence[int]] = None,
    hall_filtering: bool = True,
) -> SolveOutcome:
    """
    清單全著色的精確判定：在預算內找到著色，或證明不存在。

    Args:
        emb: 平面嵌入
        lists: 每個未著色項目的清單（必須恰好涵蓋 fixed 未著色的項目）
        fixed: 已固定的顏色
        budget: 節點預算（指派次數）
        rank: MRV 平手順序（portfolio 使用）
        hall_filtering: 是否啟用 Hall 過濾

    Raises:
        PreconditionError: 清單與未著色項目不一致
    """
    _require_coverage(emb, lists, fixed)
    start = time.perf_counter()
    items, search = build_total_search(emb, lists, fixed, budget, rank, hall_filtering)
    status = search.run()
    elapsed = time.perf_counter() - start

    witness = None
    if status == "colored":
        witness = fixed.extended({x: search.assignment[i] for i, x in enumerate(items)})
    logger.info(f"精確求解：{status}，節點 {search.nodes}，耗時 {elapsed:.3f}s（{len(items)} 個項目）")
    return SolveOutcome(status, witness, search.nodes, elapsed)


def extend_exact(
    emb: PlanarEmbedding,
    c: PartialTotalColoring,
    budget: int = DEFAULT_NODE_BUDGET,
    hall_filtering: bool = True,
) -> SolveOutcome:
    """
    判定預著色 c 能否延伸成 G 的全 k-著色（derive_lists 後交給 list_total_color_exact）。

    Raises:
        ColoringError: c 不是 H in G 的合法全著色
    """
    lists = derive_lists(emb, c)
    return list_total_color_exact(emb, lists, c, budget, hall_filtering=hall_filtering)


# ============================================================
# Portfolio（預設關閉）
# ============================================================

def portfolio_ranks(count: int, size: int) -> list[list[int]]:
    """
    產生 size 個固定的平手順序：原順序、反序、邊優先，之後是旋轉位移。
    第 0 個永遠是原順序，因此 size=1 等同一般求解。
    """
    identity = list(range(count))
    ranks = [identity]
    if size > 1:
        ranks.append([count - 1 - i for i in identity])
    for j in range(2, size):
        shift = (j * count) // size
        ranks.append([(i - shift) % count for i in identity])
    return ranks[:size]


def solve_portfolio(
    emb: PlanarEmbedding,
    lists: ListAssignment,
    fixed: PartialTotalColoring,
    budget: int = DEFAULT_NODE_BUDGET,
    size: int = DEFAULT_PORTFOLIO_SIZE,
) -> SolveOutcome:
    """
    以 ThreadPoolExecutor 平行執行數個平手順序不同的相同搜尋。

    判決規則（不受執行完成順序影響）：
        任一變體 colored → colored，見證取編號最小的 colored 變體
        否則任一變體 proven-impossible → proven-impossible
        否則 timeout
    """
    if size <= 1:
        return list_total_color_exact(emb, lists, fixed, budget)

    _require_coverage(emb, lists, fixed)
    ranks = portfolio_ranks(len(lists.items()), size)
    start = time.perf_counter()
    with ThreadPoolExecutor(max_workers=size) as executor:
        futures = [executor.submit(list_total_color_exact, emb, lists, fixed, budget, rank) for rank in ranks]
        outcomes = [f.result() for f in futures]
    elapsed = time.perf_counter() - start

    nodes = sum(o.nodes for o in outcomes)
    for status in ("colored", "proven-impossible"):
        chosen = next((o for o in outcomes if o.status == status), None)
        if chosen is not None:
            return SolveOutcome(status, chosen.witness, nodes, elapsed, method="portfolio")
    return SolveOutcome("timeout", None, nodes, elapsed, method="portfolio")

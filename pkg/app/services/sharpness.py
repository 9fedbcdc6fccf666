"""
app/services/sharpness.py - 三個銳利性範例的產生器與驗證器
============================================================
    greedy-tree(k)       ：k 棵 K₁,ₖ₋₁ 星以中心 v 相連，調色盤 2k 不可延伸、2k+1 可以
    subdivided-star(t)   ：K₁,ₜ 每條邊細分一次，預著色距離 2 的匹配，調色盤 t+2 不可延伸
    joined-triangles     ：K₁,₄ 的每片葉與一個三角形完全相連，四個三角形以 [3] 全著色，調色盤 7 不可延伸

每個產生器都固定旋轉系統，相同參數產生位元組相同的檔案。
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Optional

from app.config import DEFAULT_NODE_BUDGET
from app.schemas import SharpnessCheck, SharpnessReport, SolveStatus
from app.services import storage
from app.services.coloring_core import PartialTotalColoring
from app.services.planar_core import PlanarEmbedding
from app.services.solver import extend_exact

logger = logging.getLogger(__name__)

ExampleId = Literal["greedy-tree", "subdivided-star", "joined-triangles"]
EXAMPLE_IDS: tuple[str, ...] = ("greedy-tree", "subdivided-star", "joined-triangles")

# 參數預設值（joined-triangles 沒有參數）
DEFAULT_PARAMETERS: dict[str, Optional[int]] = {
    "greedy-tree": 3,
    "subdivided-star": 4,
    "joined-triangles": None,
}


@dataclass(frozen=True)
class NamedExample:
    """
    一個銳利性範例：嵌入、預著色（調色盤 = claimed_fail），
    以及宣稱不可延伸的調色盤與（若有）宣稱可延伸的調色盤。
    """
    id: str
    parameter: Optional[int]
    embedding: PlanarEmbedding
    precoloring: PartialTotalColoring
    claimed_fail: int
    claimed_ok: Optional[int] = None


# ============================================================
# 產生器
# ============================================================

def _greedy_tree(k: int) -> NamedExample:
    # v = 0；uᵢ = i；wⱼ⁽ⁱ⁾ = k + (i−1)(k−1) + j
    def w(i: int, j: int) -> int:
        return k + (i - 1) * (k - 1) + j

    rotations: list[tuple[int, ...]] = [tuple(range(1, k + 1))]
    rotations += [(0, *(w(i, j) for j in range(1, k))) for i in range(1, k + 1)]
    rotations += [(i,) for i in range(1, k + 1) for _ in range(1, k)]

    vertex_colors = {i: i for i in range(1, k + 1)}
    edge_colors = {}
    for i in range(1, k + 1):
        for j in range(1, k):
            vertex_colors[w(i, j)] = k + 1
            edge_colors[(i, w(i, j))] = (i + j) % k or k

    return NamedExample(
        id="greedy-tree",
        parameter=k,
        embedding=PlanarEmbedding(tuple(rotations)),
        precoloring=PartialTotalColoring(2 * k, vertex_colors, edge_colors),
        claimed_fail=2 * k,
        claimed_ok=2 * k + 1,
    )


def _subdivided_star(t: int) -> NamedExample:
    # v = 0；xᵢ = i；yᵢ = t + i
    rotations: list[tuple[int, ...]] = [tuple(range(1, t + 1))]
    rotations += [(0, t + i) for i in range(1, t + 1)]
    rotations += [(i,) for i in range(1, t + 1)]

    vertex_colors = {i: 1 for i in range(1, t)}
    vertex_colors[t] = 2
    vertex_colors.update({t + i: 3 for i in range(1, t + 1)})
    edge_colors = {(i, t + i): 2 for i in range(1, t)}
    edge_colors[(t, 2 * t)] = 1

    return NamedExample(
        id="subdivided-star",
        parameter=t,
        embedding=PlanarEmbedding(tuple(rotations)),
        precoloring=PartialTotalColoring(t + 2, vertex_colors, edge_colors),
        claimed_fail=t + 2,
    )


def _joined_triangles() -> NamedExample:
    # 中心 0；葉 ℓᵢ = i；第 i 個三角形 a, b, c = 5 + 3(i−1) + {0, 1, 2}
    rotations: dict[int, tuple[int, ...]] = {0: (1, 2, 3, 4)}
    vertex_colors: dict[int, int] = {}
    edge_colors: dict[tuple[int, int], int] = {}
    for i in range(1, 5):
        a, b, c = (5 + 3 * (i - 1) + s for s in range(3))
        rotations[i] = (0, a, b, c)
        rotations[a] = (b, i, c)
        rotations[b] = (c, i, a)
        rotations[c] = (a, i, b)
        vertex_colors.update({a: 1, b: 2, c: 3})
        edge_colors.update({(b, c): 1, (a, c): 2, (a, b): 3})

    return NamedExample(
        id="joined-triangles",
        parameter=None,
        embedding=PlanarEmbedding(tuple(rotations[v] for v in range(len(rotations)))),
        precoloring=PartialTotalColoring(7, vertex_colors, edge_colors),
        claimed_fail=7,
        claimed_ok=8,
    )


def gen_example(example_id: str, param: Optional[int] = None) -> NamedExample:
    """
    產生指定的銳利性範例。

    Args:
        example_id: greedy-tree / subdivided-star / joined-triangles
        param: greedy-tree 的 k 或 subdivided-star 的 t（皆需 ≥ 3）；joined-triangles 不接受參數

    Raises:
        ValueError: 未知的範例或參數超出範圍
    """
    if example_id not in EXAMPLE_IDS:
        raise ValueError(f"未知的範例：{example_id!r}（可用：{', '.join(EXAMPLE_IDS)}）")
    if example_id == "joined-triangles":
        if param is not None:
            raise ValueError("joined-triangles 沒有參數")
        return _joined_triangles()

    value = DEFAULT_PARAMETERS[example_id] if param is None else param
    if value < 3:
        name = "k" if example_id == "greedy-tree" else "t"
        raise ValueError(f"{example_id} 的參數 {name} 必須 ≥ 3，收到 {value}")
    example = _greedy_tree(value) if example_id == "greedy-tree" else _subdivided_star(value)
    logger.debug(f"產生範例 {example_id}({value})：V={example.embedding.n}")
    return example


# ============================================================
# 驗證
# ============================================================

def _check(example: NamedExample, palette: int, expected: Optional[SolveStatus], budget: int) -> SharpnessCheck:
    outcome = extend_exact(example.embedding, example.precoloring.with_palette(palette), budget)
    agrees = None
    if expected is not None and outcome.status != "timeout":
        agrees = outcome.status == expected
    if agrees is False:
        logger.warning(f"{example.id} 在調色盤 {palette} 的結果 {outcome.status} 與宣稱的 {expected} 不符")
    return SharpnessCheck(palette=palette, status=outcome.status, nodes=outcome.nodes, expected=expected, agrees=agrees)


def verify_sharpness(example: NamedExample, budget: int = DEFAULT_NODE_BUDGET) -> SharpnessReport:
    """
    在宣稱不可延伸的調色盤（預期 proven-impossible）與其 +1 上執行精確延伸。
    +1 只有在範例本身宣稱可延伸時才會比對，否則只回報搜尋結果。
    """
    fail = example.claimed_fail
    ok_expected: Optional[SolveStatus] = "colored" if example.claimed_ok == fail + 1 else None
    checks = [
        _check(example, fail, "proven-impossible", budget),
        _check(example, fail + 1, ok_expected, budget),
    ]
    return SharpnessReport(example=example.id, parameter=example.parameter, checks=checks)


def write_example(example: NamedExample, stem: Path) -> tuple[Path, Path]:
    """寫出 <stem>.pg 與 <stem>.ptc；回傳兩個路徑。"""
    return storage.write_instance(stem, example.embedding, example.precoloring)

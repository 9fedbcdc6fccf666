"""
app/services/storage.py - 圖檔、預著色檔與報告輸出的統一讀寫
==============================================================
這個模組是所有「讀取/寫入檔案」的唯一窗口（Repository Pattern）。

好處：
- 命令層只需要呼叫 storage.load_embedding(path)，不會到處散落 open(...)
- 成對檔案（<stem>.pg + <stem>.ptc）的命名規則集中在這裡
- 輸出路徑在寫入任何檔案之前先行驗證
"""
import logging
from pathlib import Path
from typing import Iterable, Mapping, Optional

import pandas as pd

from app.config import (
    DOT_DEFAULT_COLOR,
    DOT_PRECOLORED_COLOR,
    GRAPH_SUFFIX,
    PRECOLORING_SUFFIX,
)
from app.schemas import TransferRecord
from app.services.coloring_core import (
    PartialTotalColoring,
    parse_precoloring,
    serialize_precoloring,
)
from app.services.planar_core import PlanarEmbedding, parse_embedding, serialize_embedding

logger = logging.getLogger(__name__)


# ============================================================
# 路徑
# ============================================================

def instance_paths(stem: Path) -> tuple[Path, Path]:
    """<stem> → (<stem>.pg, <stem>.ptc)"""
    stem = Path(stem)
    return stem.with_name(stem.name + GRAPH_SUFFIX), stem.with_name(stem.name + PRECOLORING_SUFFIX)


def validate_output_path(path: Optional[Path]) -> None:
    """
    確認輸出檔的目錄存在（不建立任何檔案）。

    Raises:
        ValueError: 目錄不存在，或路徑本身是目錄
    """
    if path is None:
        return
    path = Path(path)
    if path.is_dir():
        raise ValueError(f"輸出路徑是目錄：{path}")
    parent = path.parent if str(path.parent) else Path(".")
    if not parent.is_dir():
        raise ValueError(f"輸出目錄不存在：{parent}")


def _read_text(path: Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise ValueError(f"{path} 不是 UTF-8 文字檔：{e}") from e


def _write_text(path: Path, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8", newline="\n")
        logger.info(f"已寫入 {path}")
    except OSError as e:
        raise RuntimeError(f"寫入 {path} 失敗：{e}") from e


# ============================================================
# 圖檔與預著色檔
# ============================================================

def load_embedding(path: Path) -> PlanarEmbedding:
    """讀取並驗證圖檔。"""
    return parse_embedding(_read_text(path))


def load_precoloring(path: Path) -> PartialTotalColoring:
    """讀取預著色檔。"""
    return parse_precoloring(_read_text(path))


def save_embedding(path: Path, emb: PlanarEmbedding) -> None:
    _write_text(path, serialize_embedding(emb))


def save_precoloring(path: Path, c: PartialTotalColoring) -> None:
    _write_text(path, serialize_precoloring(c))


def write_instance(stem: Path, emb: PlanarEmbedding, c: PartialTotalColoring) -> tuple[Path, Path]:
    """
    寫出一組成對檔案。

    Returns:
        (圖檔路徑, 預著色檔路徑)
    """
    graph_path, coloring_path = instance_paths(stem)
    validate_output_path(graph_path)
    save_embedding(graph_path, emb)
    save_precoloring(coloring_path, c)
    return graph_path, coloring_path


# ============================================================
# DOT 匯出
# ============================================================

def render_dot(
    emb: PlanarEmbedding,
    coloring: Optional[PartialTotalColoring] = None,
    charges: Optional[Mapping[str, str]] = None,
) -> str:
    """
    產生 Graphviz DOT 文字。預著色的頂點與邊以紅色標示並附上顏色；
    給定 charges 時，頂點標籤附上電荷，面的電荷列在圖的標籤中。
    """
    coloring = coloring or PartialTotalColoring(0)
    charges = charges or {}
    lines = ["graph G {", "  node [shape=circle];"]

    for v in range(emb.n):
        label = str(v)
        color = coloring.vertex_colors.get(v)
        if color is not None:
            label += f"\\nc={color}"
        if f"v{v}" in charges:
            label += f"\\nμ={charges[f'v{v}']}"
        pen = DOT_PRECOLORED_COLOR if color is not None else DOT_DEFAULT_COLOR
        lines.append(f'  {v} [label="{label}", color={pen}];')

    for u, v in emb.edges:
        color = coloring.edge_colors.get((u, v))
        if color is None:
            lines.append(f"  {u} -- {v} [color={DOT_DEFAULT_COLOR}];")
        else:
            lines.append(f'  {u} -- {v} [color={DOT_PRECOLORED_COLOR}, label="{color}"];')

    extra = [f"{key}: {value}" for key, value in charges.items() if not key.startswith("v")]
    if extra:
        legend = "\\l".join(extra) + "\\l"
        lines.append(f'  label="{legend}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_dot(
    path: Path,
    emb: PlanarEmbedding,
    coloring: Optional[PartialTotalColoring] = None,
    charges: Optional[Mapping[str, str]] = None,
) -> None:
    _write_text(path, render_dot(emb, coloring, charges))


# ============================================================
# 轉移紀錄 CSV
# ============================================================

TRANSFER_COLUMNS = ["step", "rule", "source", "sink", "amount"]


def transfers_frame(transfers: Iterable[TransferRecord]) -> pd.DataFrame:
    """轉移紀錄 → DataFrame（金額保留為精確分數字串）。"""
    rows = [
        {"step": i, "rule": t.rule, "source": t.source, "sink": t.sink, "amount": t.amount}
        for i, t in enumerate(transfers, start=1)
    ]
    return pd.DataFrame(rows, columns=TRANSFER_COLUMNS)


def write_transfers_csv(path: Path, transfers: Iterable[TransferRecord]) -> None:
    try:
        transfers_frame(transfers).to_csv(path, index=False, encoding="utf-8-sig")
        logger.info(f"已寫入轉移紀錄 {path}")
    except OSError as e:
        raise RuntimeError(f"寫入 {path} 失敗：{e}") from e

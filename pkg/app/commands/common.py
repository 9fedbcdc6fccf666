"""
app/commands/common.py - 各命令共用的旗標與輸出工具
====================================================
- add_instance_args：-g / -p / -k
- load_instance：讀取圖檔與預著色檔（-k 覆寫調色盤）
- emit：--json 時輸出 pydantic 模型，否則以 tabulate 輸出表格
"""
import argparse
import logging
from pathlib import Path
from typing import Iterable, Optional, Sequence

from pydantic import BaseModel
from tabulate import tabulate

from app.config import (
    DEFAULT_NODE_BUDGET,
    EXIT_IMPOSSIBLE,
    EXIT_INPUT_ERROR,
    EXIT_OK,
    EXIT_PROOF_BOUND,
    EXIT_TIMEOUT,
)
from app.schemas import ExtendStatus
from app.services import storage
from app.services.bipartite import ListColoringImpossible, ProofBoundError, SearchBudgetExceeded
from app.services.coloring_core import PartialTotalColoring
from app.services.planar_core import PlanarEmbedding

logger = logging.getLogger(__name__)

STATUS_EXIT: dict[ExtendStatus, int] = {
    "colored": EXIT_OK,
    "proven-impossible": EXIT_IMPOSSIBLE,
    "timeout": EXIT_TIMEOUT,
    "greedy-stuck": EXIT_TIMEOUT,
}


def exit_code_for(error: Exception) -> int:
    """例外 → 退出碼。ProofBoundError 與 SearchBudgetExceeded 也是 RuntimeError，必須先判斷。"""
    if isinstance(error, ProofBoundError):
        return EXIT_PROOF_BOUND
    if isinstance(error, SearchBudgetExceeded):
        return EXIT_TIMEOUT
    if isinstance(error, ListColoringImpossible):
        return EXIT_IMPOSSIBLE
    return EXIT_INPUT_ERROR


def add_instance_args(parser: argparse.ArgumentParser, precoloring_required: bool = True):
    parser.add_argument("-g", "--graph", type=Path, required=True, help="圖檔（.pg）")
    parser.add_argument(
        "-p", "--precoloring", type=Path, required=precoloring_required, help="預著色檔（.ptc）"
    )
    parser.add_argument("-k", "--palette", type=int, default=None, help="覆寫預著色檔的調色盤大小")


def add_budget_arg(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--budget", type=int, default=DEFAULT_NODE_BUDGET, help=f"搜尋節點預算（預設 {DEFAULT_NODE_BUDGET}）"
    )


def positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"必須是正整數：{text}")
    return value


def load_instance(
    graph: Path, precoloring: Optional[Path], palette: Optional[int] = None
) -> tuple[PlanarEmbedding, PartialTotalColoring]:
    """讀取一組實例；沒有預著色檔時回傳空預著色（調色盤取 -k，否則 2Δ+1）。"""
    emb = storage.load_embedding(graph)
    if precoloring is None:
        c = PartialTotalColoring(palette or 2 * emb.max_degree + 1)
    else:
        c = storage.load_precoloring(precoloring)
        if palette is not None:
            c = c.with_palette(palette)
    logger.debug(f"載入 {graph}：V={emb.n}，E={len(emb.edges)}，Δ={emb.max_degree}，k={c.k}")
    return emb, c


def emit(
    args: argparse.Namespace,
    report: BaseModel,
    rows: Iterable[Sequence] = (),
    headers: Sequence[str] = (),
    title: Optional[str] = None,
):
    """輸出一份報告：--json 時是模型本身，否則是標題加表格。"""
    if getattr(args, "json", False):
        print(report.model_dump_json(indent=2))
        return
    print_table(rows, headers, title)


def print_table(rows: Iterable[Sequence], headers: Sequence[str] = (), title: Optional[str] = None):
    if title:
        print(title)
    rows = list(rows)
    if rows:
        print(tabulate(rows, headers=list(headers), tablefmt="simple"))


def emit_many(reports: Sequence[BaseModel]):
    """批次輸出：--json 時是 JSON 陣列。"""
    print("[" + ",\n".join(r.model_dump_json(indent=2) for r in reports) + "]")

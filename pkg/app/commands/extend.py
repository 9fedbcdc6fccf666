"""
app/commands/extend.py - extend 命令：判定預著色能否延伸
=========================================================
預設流程（依序嘗試，成功就停）：
    1. greedy_extend   → 最小可用顏色，k ≥ 2Δ+1 時保證成功
    2. extend_exact    → 精確回溯搜尋（colored / proven-impossible / timeout）

--greedy、--exact、--bipartite 強制只走一條路徑。
-g/-p 可重複做批次；--jobs N 以 ProcessPoolExecutor 把不同實例分散到多個行程，
單一實例的求解永遠在一個行程內完成。
"""
import argparse
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from app.commands.common import (
    STATUS_EXIT,
    add_budget_arg,
    emit,
    emit_many,
    exit_code_for,
    load_instance,
    positive_int,
    print_table,
)
from app.config import DEFAULT_PORTFOLIO_SIZE, EXIT_OK
from app.schemas import SolveReport
from app.services import storage
from app.services.bipartite import bipartite_extension
from app.services.coloring_core import (
    derive_lists,
    greedy_extend,
    item_label,
    parse_precoloring,
    serialize_precoloring,
)
from app.services.solver import extend_exact, solve_portfolio

logger = logging.getLogger(__name__)

HEADERS = ["source", "status", "method", "nodes", "elapsed", "stuck"]


@dataclass(frozen=True)
class ExtendJob:
    """一個批次實例的所有輸入（必須可 pickle，才能送進 ProcessPoolExecutor）。"""
    graph: Path
    precoloring: Path
    palette: Optional[int]
    method: str
    d: Optional[int]
    budget: int
    portfolio: int


def register(subparsers: argparse._SubParsersAction):
    parser = subparsers.add_parser("extend", help="判定預著色能否延伸成全 k-著色")
    parser.add_argument("-g", "--graph", type=Path, action="append", required=True, help="圖檔（可重複）")
    parser.add_argument(
        "-p", "--precoloring", type=Path, action="append", required=True, help="預著色檔（可重複，與 -g 一一對應）"
    )
    parser.add_argument("-k", "--palette", type=positive_int, default=None, help="覆寫調色盤大小")
    path = parser.add_mutually_exclusive_group()
    path.add_argument("--greedy", dest="method", action="store_const", const="greedy", help="只用貪婪延伸")
    path.add_argument("--exact", dest="method", action="store_const", const="exact", help="只用精確搜尋")
    path.add_argument(
        "--bipartite", dest="method", action="store_const", const="bipartite",
        help="平面二部圖的建構式延伸（需 -d，k ≥ Δ+d+4）",
    )
    parser.add_argument("-d", type=int, default=None, help="H 的最大度上界（--bipartite 使用）")
    add_budget_arg(parser)
    parser.add_argument(
        "--portfolio", type=positive_int, default=DEFAULT_PORTFOLIO_SIZE, help="精確搜尋的平行變體數"
    )
    parser.add_argument("--jobs", type=positive_int, default=1, help="批次模式的行程數")
    parser.add_argument("-o", "--output", type=Path, default=None, help="把見證寫成 .ptc（僅限單一實例）")
    parser.add_argument("--dot", type=Path, default=None, help="把見證匯出成 DOT（僅限單一實例）")
    parser.set_defaults(handler=handle, method="auto")


# ============================================================
# 單一實例
# ============================================================

def solve_job(job: ExtendJob) -> SolveReport:
    """
    求解一個實例並回傳報告。

    Raises:
        GraphFileError / EmbeddingError / ColoringError / PreconditionError: 輸入錯誤
        ProofBoundError: --bipartite 時定理界限被違反
        SearchBudgetExceeded: --bipartite 時子程序超過預算
    """
    emb, c = load_instance(job.graph, job.precoloring, job.palette)
    source = str(job.graph)

    if job.method == "bipartite":
        if job.d is None:
            raise ValueError("--bipartite 需要 -d")
        start = time.perf_counter()
        witness = bipartite_extension(emb, c, job.d, job.budget)
        return SolveReport(
            status="colored",
            method="bipartite",
            witness=serialize_precoloring(witness),
            elapsed=round(time.perf_counter() - start, 6),
            source=source,
        )

    if job.method in ("auto", "greedy"):
        start = time.perf_counter()
        greedy = greedy_extend(emb, c)
        elapsed = round(time.perf_counter() - start, 6)
        if greedy.complete:
            return SolveReport(
                status="colored",
                method="greedy",
                witness=serialize_precoloring(greedy.coloring),
                elapsed=elapsed,
                source=source,
            )
        if job.method == "greedy":
            return SolveReport(
                status="greedy-stuck",
                method="greedy",
                stuck_item=item_label(greedy.stuck),
                elapsed=elapsed,
                source=source,
            )
        logger.info(f"{source}：貪婪延伸卡在 {item_label(greedy.stuck)}，改用精確搜尋")

    if job.portfolio > 1:
        outcome = solve_portfolio(emb, derive_lists(emb, c), c, job.budget, job.portfolio)
    else:
        outcome = extend_exact(emb, c, job.budget)
    return outcome.to_report(source)


def _run_job(job: ExtendJob) -> tuple[int, Optional[SolveReport], Optional[str]]:
    # 批次模式：每個實例的錯誤各自轉成退出碼，不影響其他實例
    try:
        report = solve_job(job)
        return STATUS_EXIT[report.status], report, None
    except Exception as e:
        return exit_code_for(e), None, f"{job.graph}：{e}"


# ============================================================
# 命令處理
# ============================================================

def handle(args: argparse.Namespace) -> int:
    graphs, precolorings = args.graph, args.precoloring
    if len(graphs) != len(precolorings):
        raise ValueError(f"-g 與 -p 的數量必須相同（{len(graphs)} ≠ {len(precolorings)}）")
    if len(graphs) > 1 and (args.output or args.dot):
        raise ValueError("-o 與 --dot 只能用在單一實例")
    storage.validate_output_path(args.output)
    storage.validate_output_path(args.dot)

    jobs = [
        ExtendJob(g, p, args.palette, args.method, args.d, args.budget, args.portfolio)
        for g, p in zip(graphs, precolorings)
    ]
    if len(jobs) == 1:
        return _handle_single(args, jobs[0])
    return _handle_batch(args, jobs)


def _handle_single(args: argparse.Namespace, job: ExtendJob) -> int:
    report = solve_job(job)
    if report.witness is not None:
        witness = parse_precoloring(report.witness)
        if args.output:
            storage.save_precoloring(args.output, witness)
        if args.dot:
            storage.write_dot(args.dot, storage.load_embedding(job.graph), witness)

    emit(args, report, _rows([report]), HEADERS, title=f"{job.graph}: {report.status}")
    if report.witness is not None and not args.json:
        print(report.witness, end="")
    return STATUS_EXIT[report.status]


def _handle_batch(args: argparse.Namespace, jobs: list[ExtendJob]) -> int:
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as executor:
            results = list(executor.map(_run_job, jobs))
    else:
        results = [_run_job(job) for job in jobs]

    reports = []
    worst = EXIT_OK
    for code, report, error in results:
        worst = max(worst, code)
        if error is not None:
            logger.error(error)
        if report is not None:
            reports.append(report)

    if args.json:
        emit_many(reports)
    else:
        print_table(_rows(reports), HEADERS, title=f"批次：{len(jobs)} 個實例，退出碼 {worst}")
    return worst


def _rows(reports: list[SolveReport]) -> list[list]:
    return [[r.source, r.status, r.method, r.nodes, r.elapsed, r.stuck_item or ""] for r in reports]

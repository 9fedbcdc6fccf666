"""
app/commands/audit.py - audit 命令：放電帳本的稽核
===================================================
初始化電荷、依序套用規則系統 R / S / T，輸出：
    - 初始總和、預期的 Euler 總和、最終總和、守恆
    - 每一筆轉移（--csv 另存成 CSV）
    - 最終電荷與負電荷元素
    - 各項述詞（holds / fails / not-applicable）

退出碼：帳本不變量（守恆、Euler 總和）不成立 → 4；
--strict 時任何述詞 fails → 1；其餘 → 0。
"""
import argparse
import logging
from pathlib import Path

from app.commands.common import emit, load_instance
from app.config import DEFAULT_OFFSET_T, EXIT_IMPOSSIBLE, EXIT_OK, EXIT_PROOF_BOUND, SCHEMES
from app.schemas import InstanceParams
from app.services import storage
from app.services.discharging import audit

logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction):
    parser = subparsers.add_parser("audit", help="放電帳本稽核")
    parser.add_argument("-g", "--graph", type=Path, required=True, help="圖檔（.pg）")
    parser.add_argument("-p", "--precoloring", type=Path, default=None, help="預著色檔（定義 H；省略時 H 為空）")
    parser.add_argument("--scheme", choices=SCHEMES, required=True, help="規則系統")
    parser.add_argument("-t", type=int, default=DEFAULT_OFFSET_T, help=f"調色盤偏移量（k = Δ + t，預設 {DEFAULT_OFFSET_T}）")
    parser.add_argument("-d", type=int, default=None, help="H 的最大度上界（規則 S 必填）")
    parser.add_argument("--strict", action="store_true", help="任何述詞 fails 時退出碼為 1")
    parser.add_argument("--csv", type=Path, default=None, help="把轉移紀錄寫成 CSV")
    parser.add_argument("--dot", type=Path, default=None, help="匯出附最終電荷的 DOT")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    storage.validate_output_path(args.csv)
    storage.validate_output_path(args.dot)
    if args.t < 0 or (args.d is not None and args.d < 0):
        raise ValueError("-t 與 -d 不可為負數")

    emb, c = load_instance(args.graph, args.precoloring)
    params = InstanceParams(delta=emb.max_degree, t=args.t, d=args.d)
    report = audit(emb, c.subgraph(), params, args.scheme)

    if args.csv:
        storage.write_transfers_csv(args.csv, report.transfers)
    if args.dot:
        storage.write_dot(args.dot, emb, c, report.final_charges)

    failing = [p.name for p in report.predicates if p.status == "fails"]
    title = (
        f"scheme {report.scheme}（Δ={params.delta}，t={params.t}，high ≥ {params.high_threshold}）\n"
        f"總和：{report.initial_total} → {report.final_total}（預期 {report.expected_total}），"
        f"守恆 {'成立' if report.conserved else '不成立'}，{len(report.transfers)} 筆轉移"
    )
    if report.negatives:
        title += f"\n負電荷：{', '.join(report.negatives)}"
    for note in report.notes:
        title += f"\n註記：{note}"
    rows = [[p.name, p.status, p.detail, ", ".join(p.failures)] for p in report.predicates]
    emit(args, report, rows, ["predicate", "status", "detail", "failures"], title=title)

    if not report.ledger_ok:
        logger.error(f"帳本不變量不成立：conserved={report.conserved}，euler={report.euler_total_ok}")
        return EXIT_PROOF_BOUND
    if args.strict and failing:
        return EXIT_IMPOSSIBLE
    return EXIT_OK

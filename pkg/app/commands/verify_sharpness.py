"""
app/commands/verify_sharpness.py - verify-sharpness 命令
=========================================================
在範例宣稱不可延伸的調色盤與其 +1 上執行精確延伸，並與宣稱比對。

退出碼：任何比對不符 → 1；否則有逾時 → 2；全部相符 → 0。
"""
import argparse
import logging

from app.commands.common import add_budget_arg, emit
from app.commands.gen import add_example_params, example_param
from app.config import EXIT_IMPOSSIBLE, EXIT_OK, EXIT_TIMEOUT
from app.services.sharpness import EXAMPLE_IDS, gen_example, verify_sharpness

logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction):
    parser = subparsers.add_parser("verify-sharpness", help="驗證範例的銳利性")
    parser.add_argument("example", choices=EXAMPLE_IDS, help="範例名稱")
    add_example_params(parser)
    add_budget_arg(parser)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    example = gen_example(args.example, example_param(args))
    report = verify_sharpness(example, args.budget)

    rows = [
        [c.palette, c.status, c.expected or "-", "-" if c.agrees is None else c.agrees, c.nodes]
        for c in report.checks
    ]
    label = report.example if report.parameter is None else f"{report.example}({report.parameter})"
    emit(args, report, rows, ["palette", "status", "expected", "agrees", "nodes"], title=label)

    if not report.all_agree:
        return EXIT_IMPOSSIBLE
    if report.any_timeout:
        return EXIT_TIMEOUT
    return EXIT_OK

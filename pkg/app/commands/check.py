"""
app/commands/check.py - check 命令：檢查（部分）全著色是否合法
"""
import argparse
import logging

from app.commands.common import add_instance_args, emit, load_instance
from app.config import EXIT_IMPOSSIBLE, EXIT_OK
from app.services.coloring_core import check_total_coloring

logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction):
    parser = subparsers.add_parser("check", help="檢查著色是否合法")
    add_instance_args(parser)
    parser.add_argument(
        "--mode",
        choices=["of-H", "of-H-in-G", "total"],
        default="of-H-in-G",
        help="of-H：只看 H；of-H-in-G：G 中相鄰的已著色頂點也必須相異；total：每個項目都已著色",
    )
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    emb, c = load_instance(args.graph, args.precoloring, args.palette)
    verdict = check_total_coloring(emb, c, args.mode)
    if not verdict.proper:
        logger.info(f"{args.graph}：{len(verdict.violations)} 筆違規（{args.mode}）")

    rows = [[v.kind, " ".join(v.items), "" if v.color is None else v.color] for v in verdict.violations]
    title = f"{args.mode}: {'proper' if verdict.proper else 'improper'}"
    emit(args, verdict, rows, ["kind", "items", "color"], title=title)
    return EXIT_OK if verdict.proper else EXIT_IMPOSSIBLE

"""
app/commands/derive_lists.py - derive-lists 命令：由預著色推導每個未著色項目的清單
"""
import argparse

from app.commands.common import add_instance_args, emit, load_instance
from app.config import EXIT_OK
from app.services.coloring_core import derive_lists


def register(subparsers: argparse._SubParsersAction):
    parser = subparsers.add_parser("derive-lists", help="推導未著色項目的清單")
    add_instance_args(parser)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    emb, c = load_instance(args.graph, args.precoloring, args.palette)
    report = derive_lists(emb, c).to_report(c.k)
    rows = [[entry.item, " ".join(map(str, entry.colors)), len(entry.colors)] for entry in report.entries]
    emit(args, report, rows, ["item", "list", "size"], title=f"palette {report.palette}，最小清單 {report.min_size}")
    return EXIT_OK

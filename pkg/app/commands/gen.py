"""
app/commands/gen.py - gen 命令：寫出銳利性範例的 .pg + .ptc
"""
import argparse
from pathlib import Path

from app.commands.common import emit, positive_int
from app.config import EXIT_OK
from app.schemas import GeneratedExample
from app.services import storage
from app.services.sharpness import EXAMPLE_IDS, gen_example, write_example


def register(subparsers: argparse._SubParsersAction):
    parser = subparsers.add_parser("gen", help="產生銳利性範例")
    parser.add_argument("example", choices=EXAMPLE_IDS, help="範例名稱")
    add_example_params(parser)
    parser.add_argument("-o", "--output", type=Path, required=True, help="輸出檔名主幹（寫出 <stem>.pg 與 <stem>.ptc）")
    parser.add_argument("--dot", type=Path, default=None, help="另外匯出 DOT")
    parser.set_defaults(handler=handle)


def add_example_params(parser: argparse.ArgumentParser):
    parser.add_argument("--k", type=positive_int, default=None, help="greedy-tree 的 k（≥ 3）")
    parser.add_argument("--t", type=positive_int, default=None, help="subdivided-star 的 t（≥ 3）")


def example_param(args: argparse.Namespace):
    """依範例挑出 --k 或 --t；給錯旗標視為輸入錯誤。"""
    if args.example == "greedy-tree":
        if args.t is not None:
            raise ValueError("greedy-tree 使用 --k，不接受 --t")
        return args.k
    if args.example == "subdivided-star":
        if args.k is not None:
            raise ValueError("subdivided-star 使用 --t，不接受 --k")
        return args.t
    if args.k is not None or args.t is not None:
        raise ValueError("joined-triangles 沒有參數")
    return None


def handle(args: argparse.Namespace) -> int:
    graph_path, precoloring_path = storage.instance_paths(args.output)
    storage.validate_output_path(graph_path)
    storage.validate_output_path(args.dot)

    example = gen_example(args.example, example_param(args))
    graph_path, precoloring_path = write_example(example, args.output)
    if args.dot:
        storage.write_dot(args.dot, example.embedding, example.precoloring)

    report = GeneratedExample(
        example=example.id,
        parameter=example.parameter,
        vertices=example.embedding.n,
        edges=len(example.embedding.edges),
        graph_path=str(graph_path),
        precoloring_path=str(precoloring_path),
        claimed_fail=example.claimed_fail,
        claimed_ok=example.claimed_ok,
    )
    rows = [["graph", report.graph_path], ["precoloring", report.precoloring_path]]
    emit(args, report, rows, ["file", "path"], title=f"{report.example}：V={report.vertices}，E={report.edges}")
    return EXIT_OK

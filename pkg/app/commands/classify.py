"""
app/commands/classify.py - classify 命令：面、度數分桶與預著色子圖的形狀
=========================================================================
輸出：
    - 每個面的長度與走訪
    - 度數分桶、Δ 與 q = 3|E| + |V_[2,b]|
    - F̃ᵢ：恰有 i 個度數 ≥ 3 頂點的面
    - （給定 -p 時）H 的分量、種類與分隔距離；距離不足時退出碼為 1
"""
import argparse
from pathlib import Path

from app.commands.common import emit, load_instance
from app.config import CONFIGURATION_DISTANCE, DEFAULT_RANGE_BOUND, EXIT_IMPOSSIBLE, EXIT_OK
from app.schemas import ClassifyReport, FaceSummary
from app.services import storage
from app.services.configurations import tilde_face_counts
from app.services.planar_core import analyze_precolored_shape, classify_degrees


def register(subparsers: argparse._SubParsersAction):
    parser = subparsers.add_parser("classify", help="面、度數分桶與預著色形狀")
    parser.add_argument("-g", "--graph", type=Path, required=True, help="圖檔（.pg）")
    parser.add_argument("-p", "--precoloring", type=Path, default=None, help="預著色檔（.ptc，可省略）")
    parser.add_argument("--bound", type=int, default=DEFAULT_RANGE_BOUND, help="q 的區間上界 b")
    parser.add_argument("--distance", type=int, default=CONFIGURATION_DISTANCE, help="H 分量間要求的最小距離")
    parser.add_argument("--dot", type=Path, default=None, help="匯出 DOT")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    storage.validate_output_path(args.dot)
    emb, c = load_instance(args.graph, args.precoloring)

    shape = None
    if args.precoloring is not None:
        shape = analyze_precolored_shape(emb, c.subgraph(), args.distance)

    report = ClassifyReport(
        vertices=emb.n,
        edges=len(emb.edges),
        faces=[FaceSummary(id=f.id, length=f.length, walk=list(f.walk)) for f in emb.faces],
        degrees=classify_degrees(emb, args.bound),
        tilde_faces=tilde_face_counts(emb),
        shape=shape,
    )
    if args.dot:
        storage.write_dot(args.dot, emb, c if args.precoloring is not None else None)

    title = f"V={report.vertices} E={report.edges} F={len(report.faces)} Δ={report.degrees.delta} q={report.degrees.q}"
    if shape is not None:
        separation = "∞" if shape.separation is None else shape.separation
        title += f"\nH：{shape.kind}，{len(shape.components)} 個分量，分隔距離 {separation}（要求 ≥ {shape.required_distance}）"
    rows = [[f.id, f.length, " ".join(map(str, f.walk))] for f in report.faces]
    emit(args, report, rows, ["face", "length", "walk"], title=title)

    if shape is not None and not shape.meets_distance:
        return EXIT_IMPOSSIBLE
    return EXIT_OK

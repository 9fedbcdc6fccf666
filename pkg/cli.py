"""
cli.py - planar-total-ext 命令列入口點
=======================================
這個檔案是整個工具的啟動入口，職責非常單純：
1. 建立 argparse parser，掛載 app/commands/ 下的各個動詞
2. 設定日誌（一律寫到 stderr，報告寫到 stdout）
3. 把例外對應成退出碼

各動詞的實作都在 app/commands/：
  - extend           : 判定預著色能否延伸（greedy → exact，或 --bipartite）
  - check            : 檢查著色是否合法
  - derive-lists     : 推導未著色項目的清單
  - audit            : 放電帳本稽核（規則 R / S / T）
  - classify         : 面、度數分桶與預著色形狀
  - gen              : 產生銳利性範例
  - verify-sharpness : 驗證範例的銳利性

退出碼：0 成功；1 證明不可能或述詞不成立；2 預算耗盡；3 輸入錯誤；4 定理界限被違反。
"""
import argparse
import logging
import sys
from typing import Optional, Sequence

from app.commands import COMMANDS
from app.commands.common import exit_code_for
from app.config import EXIT_INPUT_ERROR, LOG_FORMAT

logger = logging.getLogger("planar_total_ext")


class UsageError(Exception):
    """命令列語法錯誤（未知動詞、未知旗標、旗標值不合法）。"""


class _Parser(argparse.ArgumentParser):
    # argparse 預設以退出碼 2 結束，但 2 代表逾時
    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="planar-total-ext", description="平面圖的全著色延伸工具")
    subparsers = parser.add_subparsers(dest="verb", required=True, metavar="VERB", parser_class=_Parser)
    for command in COMMANDS:
        command.register(subparsers)
    for sub in subparsers.choices.values():
        sub.add_argument("-v", "--verbose", action="count", default=0, help="-v 為 INFO，-vv 為 DEBUG")
        sub.add_argument("--json", action="store_true", help="以 JSON 輸出報告")
    return parser


def setup_logging(verbosity: int):
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """解析參數、執行動詞，回傳退出碼。"""
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_INPUT_ERROR

    setup_logging(args.verbose)
    try:
        return args.handler(args)
    except (ValueError, OSError, RuntimeError) as e:
        code = exit_code_for(e)
        if code == EXIT_INPUT_ERROR:
            logger.error(f"輸入錯誤：{e}")
        else:
            logger.error(f"{type(e).__name__}：{e}")
        return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

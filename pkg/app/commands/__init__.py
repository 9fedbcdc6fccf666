"""
app/commands - 每個動詞一個模組，各自提供 register(subparsers) 與 handle(args) -> 退出碼。
"""
from app.commands import audit, check, classify, derive_lists, extend, gen, verify_sharpness

COMMANDS = (extend, check, derive_lists, audit, classify, gen, verify_sharpness)

"""
app/config.py - 常數與預設值的統一管理
=======================================
所有「會影響求解結果或輸出格式」的常數都集中在這裡。
要調整預設的搜尋預算、退出碼或檔案格式標頭時，只需要修改這一個檔案。

使用方法：
    from app.config import DEFAULT_NODE_BUDGET, EXIT_IMPOSSIBLE
"""

# ============================================================
# 檔案格式
# ============================================================

# 圖檔（旋轉系統）第一行必須是這個標頭
GRAPH_FILE_HEADER = "planar 1"

# 成對檔案的副檔名：gen 會寫出 <stem>.pg 與 <stem>.ptc
GRAPH_SUFFIX = ".pg"
PRECOLORING_SUFFIX = ".ptc"

# 兩種檔案格式共用的註解符號
COMMENT_CHAR = "#"

# ============================================================
# 求解器
# ============================================================

# 回溯搜尋的節點上限（以節點數而非秒數計，確保結果可重現）
DEFAULT_NODE_BUDGET = 5_000_000

# portfolio 模式預設的平行變體數（預設關閉，只有明確要求時才使用）
DEFAULT_PORTFOLIO_SIZE = 1

# ============================================================
# 放電規則
# ============================================================

# 規則 R 的預設調色盤偏移量 t（k = Δ + t）
DEFAULT_OFFSET_T = 4

# 規則 R 要求的團間最小距離（距離小於 3 時組態可能重疊）
CONFIGURATION_DISTANCE = 3

# classify 的預設區間上界 b（q = 3|E| + |V_[2,b]|），對應 d = 0 時的 d + 5
DEFAULT_RANGE_BOUND = 5

# 三套規則系統的名稱
SCHEMES = ("R", "S", "T")

# ============================================================
# 命令列退出碼
# ============================================================

EXIT_OK = 0               # 成功／已延伸／述詞成立
EXIT_IMPOSSIBLE = 1       # 證明不可能，或述詞不成立
EXIT_TIMEOUT = 2          # 節點預算耗盡
EXIT_INPUT_ERROR = 3      # 輸入錯誤（語法、非平面、不合法的預著色、未知旗標）
EXIT_PROOF_BOUND = 4      # 定理保證的界限被違反（代表實作錯誤，與輸入錯誤分開回報）

# ============================================================
# 日誌與輸出
# ============================================================

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"

# DOT 匯出：預著色項目以紅色標示
DOT_PRECOLORED_COLOR = "red"
DOT_DEFAULT_COLOR = "black"

"""
app/schemas.py - 統一的 Pydantic 資料模型定義
=================================================
這個檔案是對外報告的「守門員」。
所有會以 --json 輸出的結構都在這裡統一定義，確保欄位名稱與順序穩定（golden 檔測試依賴它）。

精確分數（fractions.Fraction）在報告中一律以字串表示，例如 "-1/3"。
"""
from typing import Literal, Optional

from pydantic import BaseModel, Field, computed_field

PredicateStatus = Literal["holds", "fails", "not-applicable"]
SolveStatus = Literal["colored", "proven-impossible", "timeout"]
ExtendStatus = Literal["colored", "proven-impossible", "timeout", "greedy-stuck"]
CheckMode = Literal["of-H", "of-H-in-G", "total"]


# ============================================================
# 平面嵌入相關 Schema
# ============================================================

class DegreeClassification(BaseModel):
    """
    度數分類：Δ、各度數的頂點桶，以及 q = 3|E| + |V_[2,b]|。
    buckets 只列出非空的桶，鍵為度數。
    """
    delta: int
    buckets: dict[int, list[int]]
    range_bound: int                                        # q 所使用的區間上界 b
    q: int

    def vertices_in_range(self, low: int, high: int) -> list[int]:
        """V_[low,high]：度數介於 low 與 high（含）之間的頂點。"""
        return sorted(v for deg, vs in self.buckets.items() if low <= deg <= high for v in vs)


class ShapeComponent(BaseModel):
    """H 的一個連通分量。"""
    vertices: list[int]
    edges: list[tuple[int, int]]


class PrecoloredShape(BaseModel):
    """
    預著色子圖 H 的形狀。
    separation 為 None 代表 +∞（H 少於兩個分量，距離條件自動成立）。
    """
    components: list[ShapeComponent]
    kind: Literal["arbitrary", "matching", "clique-set"]
    separation: Optional[int] = None
    required_distance: int
    meets_distance: bool
    max_degree: int = 0                                     # H 的最大度（規則 S/T 的假設）


class FaceSummary(BaseModel):
    id: int
    length: int
    walk: list[int]


class ClassifyReport(BaseModel):
    """classify 命令的輸出。"""
    vertices: int
    edges: int
    faces: list[FaceSummary]
    degrees: DegreeClassification
    tilde_faces: dict[int, list[int]]                       # i → F̃ᵢ 的面編號
    shape: Optional[PrecoloredShape] = None


# ============================================================
# 著色相關 Schema
# ============================================================

class Violation(BaseModel):
    """一筆違規：兩個（或一個，uncolored 時）項目與其共同顏色。"""
    kind: Literal["vertex-vertex", "edge-edge", "edge-vertex", "uncolored"]
    items: list[str]
    color: Optional[int] = None


class Verdict(BaseModel):
    mode: CheckMode
    proper: bool
    violations: list[Violation] = Field(default_factory=list)


class ListEntry(BaseModel):
    item: str
    colors: list[int]


class ListReport(BaseModel):
    """derive-lists 命令的輸出。"""
    palette: int
    entries: list[ListEntry]
    min_size: Optional[int] = None


class SolveReport(BaseModel):
    """
    求解結果的報告形式。
    witness 使用預著色檔的語法（可直接存成 .ptc 再餵回 check）。
    """
    status: ExtendStatus                                    # greedy-stuck：只用 --greedy 且貪婪卡住
    method: str                                             # greedy / exact / bipartite / portfolio
    witness: Optional[str] = None
    stuck_item: Optional[str] = None                        # greedy 失敗時卡住的項目
    nodes: int = 0
    elapsed: float = 0.0
    source: Optional[str] = None                            # 批次模式下的輸入檔


# ============================================================
# 放電相關 Schema
# ============================================================

class InstanceParams(BaseModel):
    """
    規則系統的實例參數。

    high_threshold = ⌈(Δ+t)/2⌉，頂點度數達到門檻即為 high。
    """
    delta: int = Field(ge=0)                                # 最大度 Δ
    t: int = Field(ge=0)                                    # 調色盤偏移量（k = Δ + t）
    d: Optional[int] = Field(default=None, ge=0)            # H 的最大度上界（規則 S）

    @computed_field
    @property
    def high_threshold(self) -> int:
        return -(-(self.delta + self.t) // 2)

    def is_high(self, degree: int) -> bool:
        return degree >= self.high_threshold


class ConfigReport(BaseModel):
    """一個預著色團 Hᵢ 的組態資料。"""
    index: int
    clique: list[int]
    closed_neighborhood: list[int]                          # N[Hᵢ]
    high_vertices: list[int]
    degree_signature: list[int]                             # Hᵢ 頂點度數（遞增）
    signature_label: str                                    # 例如 "(2,2,h)"
    poor: bool
    shape_id: Optional[int] = None                          # 貧組態目錄編號 1..16（未收錄則為 None）
    triangle_faces: list[int] = Field(default_factory=list)  # 含 Hᵢ 預著色邊的 3-面
    score: int
    helpful_face: Optional[int] = None
    helpful_status: Optional[str] = None                    # 不適用或不合資格時的原因


class HelpfulFaceReport(BaseModel):
    face: int
    length: int
    x2: int                                                 # 幫助的 |Hᵢ| = 2 貧組態數
    x3: int                                                 # 幫助的 |Hᵢ| ≥ 3 貧組態數
    helped_configs: list[int]
    face_length_bound: PredicateStatus


class NeedyFace(BaseModel):
    face: int
    type: Literal[1, 2]


class NeedyVertex(BaseModel):
    vertex: int
    degree: int
    faces: list[NeedyFace]
    eta: int
    bound: PredicateStatus                                  # η(v) ≤ ½deg(v)


class NeedyReport(BaseModel):
    vertices: list[NeedyVertex] = Field(default_factory=list)


class ClaimPredicate(BaseModel):
    """三態述詞：holds / fails / not-applicable。"""
    name: str
    status: PredicateStatus
    detail: str = ""
    failures: list[str] = Field(default_factory=list)


class TransferRecord(BaseModel):
    source: str
    sink: str
    amount: str
    rule: str


class AuditReport(BaseModel):
    """audit 命令的完整報告。"""
    scheme: Literal["R", "S", "T"]
    params: InstanceParams
    initial_total: str
    expected_total: str
    final_total: str
    conserved: bool
    euler_total_ok: bool
    transfers: list[TransferRecord]
    final_charges: dict[str, str]
    negatives: list[str]
    predicates: list[ClaimPredicate]
    notes: list[str] = Field(default_factory=list)
    configurations: list[ConfigReport] = Field(default_factory=list)
    helpful_faces: list[HelpfulFaceReport] = Field(default_factory=list)
    needy: Optional[NeedyReport] = None

    @property
    def ledger_ok(self) -> bool:
        return self.conserved and self.euler_total_ok


# ============================================================
# 銳利性範例 Schema
# ============================================================

class SharpnessCheck(BaseModel):
    palette: int
    status: SolveStatus
    nodes: int
    expected: Optional[SolveStatus] = None                  # 範例宣稱的結果（沒有宣稱則為 None）
    agrees: Optional[bool] = None


class SharpnessReport(BaseModel):
    example: str
    parameter: Optional[int] = None
    checks: list[SharpnessCheck]

    @property
    def all_agree(self) -> bool:
        return all(c.agrees is not False for c in self.checks)

    @property
    def any_timeout(self) -> bool:
        return any(c.status == "timeout" for c in self.checks)


class GeneratedExample(BaseModel):
    """gen 命令的輸出：寫出的成對檔案與範例宣稱的調色盤。"""
    example: str
    parameter: Optional[int] = None
    vertices: int
    edges: int
    graph_path: str
    precoloring_path: str
    claimed_fail: int
    claimed_ok: Optional[int] = None

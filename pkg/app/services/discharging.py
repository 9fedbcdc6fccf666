"""
app/services/discharging.py - 精確分數的電荷帳本與三套放電規則
================================================================
    - 規則 R：團集合（距離 ≥ 3）的預著色，初始電荷 deg−4 / ℓ−4，總和 −8
    - 規則 S：最大度 ≤ d 的預著色，初始電荷 3deg−6 / −6，總和 −12
    - 規則 T：最大度 ≤ 1 的預著色，初始電荷 deg−4 / ℓ−4，總和 −8

所有電荷都是 fractions.Fraction，帳本只能透過「轉移」改變，因此總和必然守恆。
規則依固定順序執行，每筆轉移都記錄（來源、目的、數量、規則編號），可重播。

帳戶鍵：頂點 "v3"、面 "f0"、組態 "C1"、全域池 "P"。

使用方法：
    report = audit(emb, h, InstanceParams(delta=emb.max_degree, t=4), "R")
    for key in report.negatives:
        print(key, report.final_charges[key])
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Optional

from app.schemas import (
    AuditReport,
    ClaimPredicate,
    ConfigReport,
    HelpfulFaceReport,
    InstanceParams,
    NeedyReport,
    PredicateStatus,
    TransferRecord,
)
from app.services.configurations import (
    POOR_SCORE_BOUND_LARGE,
    POOR_SCORE_BOUNDS,
    SCORE_BOUND,
    HypothesisError,
    configurations,
    helpful_faces,
    is_low_leaf,
    leaves,
    needy_faces,
    tilde_face_counts,
)
from app.services.planar_core import PlanarEmbedding, Subgraph

logger = logging.getLogger(__name__)

Scheme = Literal["R", "S", "T"]

POT = "P"
EXPECTED_TOTALS: dict[str, Fraction] = {"R": Fraction(-8), "S": Fraction(-12), "T": Fraction(-8)}


def vertex_key(v: int) -> str:
    return f"v{v}"


def face_key(f: int) -> str:
    return f"f{f}"


def config_key(i: int) -> str:
    return f"C{i}"


# ============================================================
# 帳本
# ============================================================

@dataclass(frozen=True)
class Transfer:
    source: str
    sink: str
    amount: Fraction
    rule: str

    def to_record(self) -> TransferRecord:
        return TransferRecord(source=self.source, sink=self.sink, amount=str(self.amount), rule=self.rule)


@dataclass
class ChargeLedger:
    """帳戶 → 精確電荷；charges 的插入順序即報告順序。"""
    scheme: Scheme
    charges: dict[str, Fraction] = field(default_factory=dict)
    transfers: list[Transfer] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def total(self) -> Fraction:
        return sum(self.charges.values(), Fraction(0))

    def transfer(self, source: str, sink: str, amount: Fraction, rule: str):
        if amount == 0:
            return
        for key in (source, sink):
            if key not in self.charges:
                raise KeyError(f"帳本中沒有帳戶 {key!r}")
        self.charges[source] -= amount
        self.charges[sink] += amount
        self.transfers.append(Transfer(source, sink, Fraction(amount), rule))

    def note(self, message: str):
        logger.debug(f"[{self.scheme}] {message}")
        self.notes.append(message)

    def copy(self) -> "ChargeLedger":
        return ChargeLedger(self.scheme, dict(self.charges), list(self.transfers), list(self.notes))

    def negatives(self) -> list[str]:
        return [key for key, charge in self.charges.items() if charge < 0]

    def formatted(self) -> dict[str, str]:
        return {key: str(charge) for key, charge in self.charges.items()}


def initial_charges(emb: PlanarEmbedding, scheme: Scheme) -> ChargeLedger:
    """
    初始電荷：
        R / T：頂點 deg−4、面 ℓ−4
        S：頂點 3deg−6、面 −6
    全域池從 0 開始；組態帳戶在套用規則 R 時才建立（初始為 0）。
    """
    if scheme not in EXPECTED_TOTALS:
        raise ValueError(f"未知的規則系統：{scheme!r}")
    ledger = ChargeLedger(scheme)
    for v in range(emb.n):
        deg = emb.degree(v)
        ledger.charges[vertex_key(v)] = Fraction(3 * deg - 6 if scheme == "S" else deg - 4)
    for face in emb.faces:
        ledger.charges[face_key(face.id)] = Fraction(-6 if scheme == "S" else face.length - 4)
    ledger.charges[POT] = Fraction(0)
    return ledger


def replay(initial: ChargeLedger, transfers: list[Transfer]) -> ChargeLedger:
    """把轉移紀錄重新套用到初始帳本上。"""
    ledger = ChargeLedger(initial.scheme, dict(initial.charges), [], list(initial.notes))
    for t in transfers:
        ledger.charges.setdefault(t.source, Fraction(0))
        ledger.charges.setdefault(t.sink, Fraction(0))
        ledger.transfer(t.source, t.sink, t.amount, t.rule)
    return ledger


# ============================================================
# 規則系統
# ============================================================

@dataclass
class _SchemeContext:
    configs: list[ConfigReport] = field(default_factory=list)
    helpful: list[HelpfulFaceReport] = field(default_factory=list)
    needy: Optional[NeedyReport] = None


def _rules_r(emb: PlanarEmbedding, h: Subgraph, params: InstanceParams, ledger: ChargeLedger) -> _SchemeContext:
    configs = configurations(emb, h, params)
    context = _SchemeContext(configs, helpful_faces(emb, configs))
    for config in configs:
        ledger.charges.setdefault(config_key(config.index), Fraction(0))
    t = params.t

    # R1
    for config in configs:
        if not config.poor:
            for u in config.high_vertices:
                ledger.transfer(vertex_key(u), config_key(config.index), Fraction(config.score, 2), "R1")

    # R2
    for config in configs:
        if not config.poor or len(config.clique) < 2:
            continue
        from_face = 1 if len(config.clique) == 2 else 2
        if config.helpful_face is None:
            ledger.note(f"R2：{config_key(config.index)} 沒有 helpful face（{config.helpful_status}），略過面的部分")
        else:
            ledger.transfer(face_key(config.helpful_face), config_key(config.index), Fraction(from_face), "R2")
        if not config.high_vertices:
            ledger.note(f"R2：{config_key(config.index)} 沒有高頂點，略過高頂點的部分")
        else:
            ledger.transfer(
                vertex_key(config.high_vertices[0]), config_key(config.index),
                Fraction(config.score - from_face), "R2",
            )

    # R3
    for config in configs:
        for v in config.clique:
            if 1 <= emb.degree(v) <= 3:
                ledger.transfer(config_key(config.index), vertex_key(v), Fraction(4 - emb.degree(v)), "R3")

    # R4
    for config in configs:
        for f in config.triangle_faces:
            ledger.transfer(config_key(config.index), face_key(f), Fraction(1), "R4")

    # R5
    for face in emb.faces:
        if face.length != 3 or face.edges & h.edges:
            continue
        for u in sorted(face.vertices):
            if params.is_high(emb.degree(u)):
                ledger.transfer(vertex_key(u), face_key(face.id), Fraction(1, 2), "R5")

    # R6：V_Δ 付 3−t 給全域池，V_{t+1}∖V(H) 從全域池收 4−deg = 3−t
    if t <= 2:
        for v in range(emb.n):
            if emb.degree(v) == params.delta:
                ledger.transfer(vertex_key(v), POT, Fraction(3 - t), "R6")
        for v in range(emb.n):
            if emb.degree(v) == t + 1 and v not in h.vertices:
                ledger.transfer(POT, vertex_key(v), Fraction(4 - emb.degree(v)), "R6")

    # R7
    if t == 1:
        for v in range(emb.n):
            if emb.degree(v) == 3 and v not in h.vertices:
                for u in emb.neighbors(v):
                    ledger.transfer(vertex_key(u), vertex_key(v), Fraction(1, 3), "R7")
    return context


def _rules_s(emb: PlanarEmbedding, h: Subgraph, params: InstanceParams, ledger: ChargeLedger) -> _SchemeContext:
    if params.d is None:
        raise HypothesisError("規則 S 需要 d（H 的最大度上界）")
    if h.max_degree > params.d:
        raise HypothesisError(f"H 的最大度 {h.max_degree} 超過 d = {params.d}")

    # S1
    for m, face_ids in tilde_face_counts(emb).items():
        for f in face_ids:
            if m == 0:
                ledger.note(f"S1：{face_key(f)} 上沒有度數 ≥ 3 的頂點，不收電荷")
                continue
            for u in sorted(emb.faces[f].vertices):
                if emb.degree(u) >= 3:
                    ledger.transfer(vertex_key(u), face_key(f), Fraction(6, m), "S1")

    # S2
    for v in leaves(emb):
        ledger.transfer(vertex_key(emb.neighbors(v)[0]), vertex_key(v), Fraction(3), "S2")
    return _SchemeContext()


def _second_neighbors(emb: PlanarEmbedding, leaf: int) -> tuple[int, int, int]:
    """low-leaf 在其面上的兩個第二鄰點：走訪 a→w→leaf→w→b 中的 a 與 b。"""
    w = emb.neighbors(leaf)[0]
    face = emb.face_of_dart((w, leaf))
    j = face.darts.index((w, leaf))
    n = face.length
    a = face.darts[(j - 1) % n][0]
    b = face.darts[(j + 2) % n][1]
    return face.id, a, b


def _rules_t(emb: PlanarEmbedding, h: Subgraph, params: InstanceParams, ledger: ChargeLedger) -> _SchemeContext:
    if h.max_degree > 1:
        raise HypothesisError(f"規則 T 要求 H 的最大度 ≤ 1，實際為 {h.max_degree}")
    t = params.t

    # T1
    for u in leaves(emb):
        w = emb.neighbors(u)[0]
        if params.is_high(emb.degree(w)):
            f = emb.face_of_dart((u, w)).id
            ledger.transfer(face_key(f), vertex_key(u), Fraction(1), "T1")
            ledger.transfer(vertex_key(w), vertex_key(u), Fraction(2), "T1")

    # T2
    for u in leaves(emb):
        if not is_low_leaf(emb, u, params):
            continue
        w = emb.neighbors(u)[0]
        f, a, b = _second_neighbors(emb, u)
        ledger.transfer(face_key(f), vertex_key(u), Fraction(1), "T2")
        ledger.transfer(vertex_key(w), vertex_key(u), Fraction(1), "T2")
        if a == u:
            ledger.note(f"T2：{vertex_key(u)} 沒有第二鄰點（鄰點 {vertex_key(w)} 的度數為 1），略過")
            continue
        if a == b:
            ledger.note(f"T2：{vertex_key(u)} 的兩個第二鄰點都是 {vertex_key(a)}，兩次各付 1/2")
        ledger.transfer(vertex_key(a), vertex_key(u), Fraction(1, 2), "T2")
        ledger.transfer(vertex_key(b), vertex_key(u), Fraction(1, 2), "T2")

    # T3
    for face in emb.faces:
        if face.length != 3:
            continue
        high = sorted(u for u in face.vertices if params.is_high(emb.degree(u)))
        if not high:
            ledger.note(f"T3：3-面 {face_key(face.id)} 沒有高頂點，略過")
            continue
        for u in high:
            ledger.transfer(vertex_key(u), face_key(face.id), Fraction(1, len(high)), "T3")

    # T4
    if t in (3, 4):
        for v in range(emb.n):
            if t <= emb.degree(v) <= 4:
                ledger.transfer(POT, vertex_key(v), Fraction(2), "T4")
        for v in range(emb.n):
            if params.delta - 4 + t <= emb.degree(v) <= params.delta:
                ledger.transfer(vertex_key(v), POT, Fraction(2), "T4")

    return _SchemeContext(needy=needy_faces(emb, h, params))


_RULES = {"R": _rules_r, "S": _rules_s, "T": _rules_t}


def _apply(
    emb: PlanarEmbedding, h: Subgraph, params: InstanceParams, ledger: ChargeLedger
) -> tuple[ChargeLedger, _SchemeContext]:
    result = ledger.copy()
    context = _RULES[ledger.scheme](emb, h, params, result)
    rules = sorted({t.rule for t in result.transfers})
    for rule in rules:
        count = sum(1 for t in result.transfers if t.rule == rule)
        logger.debug(f"規則 {rule}：{count} 筆轉移")
    return result, context


def apply_scheme(emb: PlanarEmbedding, h: Subgraph, params: InstanceParams, ledger: ChargeLedger) -> ChargeLedger:
    """
    依序套用帳本所屬規則系統的所有規則，回傳新的帳本（原帳本不變）。

    Raises:
        HypothesisError: H 不符合規則系統的假設
    """
    return _apply(emb, h, params, ledger)[0]


# ============================================================
# 述詞
# ============================================================

def _predicate(name: str, failures: list[str], detail: str = "") -> ClaimPredicate:
    status: PredicateStatus = "fails" if failures else "holds"
    return ClaimPredicate(name=name, status=status, detail=detail, failures=failures)


def _not_applicable(name: str, detail: str) -> ClaimPredicate:
    return ClaimPredicate(name=name, status="not-applicable", detail=detail)


def _degree_sum(emb: PlanarEmbedding, h: Subgraph, params: InstanceParams) -> ClaimPredicate:
    bound = params.delta + params.t
    failures = []
    for e in emb.edges:
        if e in h.edges:
            continue
        for u, v in (e, e[::-1]):
            if u not in h.vertices and 2 * emb.degree(u) <= bound and emb.degree(u) + emb.degree(v) < bound:
                failures.append(f"e{e[0]}-{e[1]}")
                break
    return _predicate("degree-sum", failures, f"未著色邊 uv，u ∉ V(H) 且 2deg(u) ≤ Δ+t 時 deg(u)+deg(v) ≥ {bound}")


def _vertices_in(emb: PlanarEmbedding, low: int, high: int) -> list[int]:
    return [v for v in range(emb.n) if low <= emb.degree(v) <= high]


def _predicates_r(emb, h, params, context: _SchemeContext) -> list[ClaimPredicate]:
    t = params.t
    result = [_degree_sum(emb, h, params)]

    if t >= 2:
        outside = [vertex_key(v) for v in _vertices_in(emb, 1, t - 1) if v not in h.vertices]
        result.append(_predicate("low-degree-precolored", outside, f"V_[1,{t - 1}] ⊆ V(H)"))
    else:
        result.append(_not_applicable("low-degree-precolored", "只在 t ≥ 2 時適用"))

    if context.configs:
        failures = []
        for config in context.configs:
            bound = SCORE_BOUND
            if config.poor:
                bound = POOR_SCORE_BOUNDS.get(len(config.clique), POOR_SCORE_BOUND_LARGE)
            if config.score > bound:
                failures.append(f"{config_key(config.index)}: s={config.score} > {bound}")
        result.append(_predicate("score-bound", failures, "s ≤ 6；poor 時依 |Hᵢ| 為 0 / 5 / 6"))
    else:
        result.append(_not_applicable("score-bound", "沒有預著色團"))

    if context.helpful:
        failures = [
            f"{face_key(r.face)}: ℓ={r.length}, x2={r.x2}, x3={r.x3}"
            for r in context.helpful if r.face_length_bound == "fails"
        ]
        result.append(_predicate("helpful-face-length", failures, "ℓ(f) ≥ 4(x2+x3)，單一組態時 ≥ 5 / 6"))
    else:
        result.append(_not_applicable("helpful-face-length", "沒有 helpful face"))

    if t <= 2:
        pot_in = [v for v in range(emb.n) if emb.degree(v) == t + 1 and v not in h.vertices]
        pot_out = [v for v in range(emb.n) if emb.degree(v) == params.delta]
        failures = [] if len(pot_in) < len(pot_out) else [f"|V_{t + 1}∖V(H)|={len(pot_in)} ≥ |V_Δ|={len(pot_out)}"]
        result.append(_predicate("pot-count", failures, "|V_{t+1}∖V(H)| < |V_Δ|"))
    else:
        result.append(_not_applicable("pot-count", "只在 t ≤ 2 時適用"))
    return result


def _predicates_s(emb, h, params, context: _SchemeContext) -> list[ClaimPredicate]:
    d = params.d or 0
    mid = [vertex_key(v) for v in _vertices_in(emb, 2, d + 5)]
    crowded = []
    for v in range(emb.n):
        count = sum(1 for u in emb.neighbors(v) if emb.degree(u) == 1)
        if count > d:
            crowded.append(f"{vertex_key(v)}: {count} 片葉")
    tilde = tilde_face_counts(emb)
    small = [face_key(f) for m in (0, 1, 2) for f in tilde.get(m, [])]
    return [
        _predicate("mid-range-empty", mid, f"V_[2,{d + 5}] = ∅"),
        _predicate("leaves-per-vertex", crowded, f"每個頂點至多鄰接 {d} 片葉"),
        _predicate("small-tilde-faces-empty", small, "F̃0 = F̃1 = F̃2 = ∅"),
    ]


def _predicates_t(emb, h, params, context: _SchemeContext) -> list[ClaimPredicate]:
    t = params.t
    no_high = [
        f"e{u}-{v}" for u, v in emb.edges
        if (u, v) not in h.edges and not params.is_high(emb.degree(u)) and not params.is_high(emb.degree(v))
    ]
    loose_leaves = [vertex_key(v) for v in leaves(emb) if v not in h.vertices]
    low_range = [vertex_key(v) for v in _vertices_in(emb, 2, t - 1)]
    needy = [
        f"{vertex_key(r.vertex)}: η={r.eta}, deg={r.degree}"
        for r in (context.needy.vertices if context.needy else []) if r.bound == "fails"
    ]

    short_faces = []
    for face in emb.faces:
        x = sum(1 for v in face.vertices if emb.degree(v) == 1)
        if x >= 1 and face.length < x + 4:
            short_faces.append(f"{face_key(face.id)}: ℓ={face.length}, x={x}")

    result = [
        _degree_sum(emb, h, params),
        _predicate("high-endpoint", no_high, "每條未著色邊至少有一個高端點"),
        _predicate("leaves-precolored", loose_leaves, "V_1 ⊆ V(H)"),
        _predicate("low-range-empty", low_range, f"V_[2,{t - 1}] = ∅"),
        _predicate("needy-bound", needy, "η(v) ≤ deg(v)/2"),
        _predicate("leaf-face-length", short_faces, "有 x ≥ 1 片葉的面 ℓ(f) ≥ x+4"),
    ]
    if t in (3, 4):
        low = _vertices_in(emb, t, 4)
        high = _vertices_in(emb, params.delta - 4 + t, params.delta)
        failures = [] if len(low) < len(high) else [f"|V_[{t},4]|={len(low)} ≥ |V_[Δ-4+t,Δ]|={len(high)}"]
        result.append(_predicate("pot-count", failures, "|V_[t,4]| < |V_[Δ−4+t,Δ]|"))
    else:
        result.append(_not_applicable("pot-count", "只在 t ∈ {3,4} 時適用"))
    return result


_PREDICATES = {"R": _predicates_r, "S": _predicates_s, "T": _predicates_t}


# ============================================================
# Audit
# ============================================================

def _same_charges(a: dict[str, Fraction], b: dict[str, Fraction]) -> bool:
    # 沒有任何轉移的組態帳戶只存在於其中一邊，視為 0
    return all(a.get(key, Fraction(0)) == b.get(key, Fraction(0)) for key in a.keys() | b.keys())


def audit(emb: PlanarEmbedding, h: Subgraph, params: InstanceParams, scheme: Scheme) -> AuditReport:
    """
    初始化帳本、套用規則系統，並產生完整報告。

    報告中的述詞只是診斷：它們在最小反例上才有保證，任意輸入上出現 fails 是正常的。
    帳本本身的不變量（守恆、Euler 初始總和）則必須永遠成立。

    Raises:
        HypothesisError: H 不符合規則系統的假設
    """
    initial = initial_charges(emb, scheme)
    final, context = _apply(emb, h, params, initial)

    replayed = replay(initial, final.transfers)
    conserved = final.total() == initial.total() and _same_charges(replayed.charges, final.charges)
    expected = EXPECTED_TOTALS[scheme]
    euler_ok = initial.total() == expected
    negatives = final.negatives()

    predicates = [
        _predicate("conservation", [] if conserved else [f"{initial.total()} → {final.total()}"], "Σ 最終 = Σ 初始"),
        _predicate("euler-total", [] if euler_ok else [str(initial.total())], f"初始總和 = {expected}"),
        _predicate("nonnegative-final", negatives, "所有最終電荷 ≥ 0"),
        *_PREDICATES[scheme](emb, h, params, context),
    ]
    logger.info(
        f"audit {scheme}：{len(final.transfers)} 筆轉移，總和 {initial.total()} → {final.total()}，"
        f"{len(negatives)} 個負電荷元素"
    )

    return AuditReport(
        scheme=scheme,
        params=params,
        initial_total=str(initial.total()),
        expected_total=str(expected),
        final_total=str(final.total()),
        conserved=conserved,
        euler_total_ok=euler_ok,
        transfers=[t.to_record() for t in final.transfers],
        final_charges=final.formatted(),
        negatives=negatives,
        predicates=predicates,
        notes=final.notes,
        configurations=context.configs,
        helpful_faces=context.helpful,
        needy=context.needy,
    )


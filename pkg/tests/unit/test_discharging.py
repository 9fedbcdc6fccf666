"""
tests/unit/test_discharging.py - charge ledger, rule schemes and audit reports
"""
import random
from fractions import Fraction

import pytest

from app.schemas import InstanceParams
from app.services.configurations import HypothesisError
from app.services.discharging import (
    ChargeLedger,
    apply_scheme,
    audit,
    initial_charges,
    replay,
)
from app.services.planar_core import subgraph_from_items
from tests.fixtures.graphs import random_bounded_degree_subgraph, random_clique_set, random_corpus


def _status(report, name):
    return next(p.status for p in report.predicates if p.name == name)


class TestChargeLedger:
    def test_transfer_moves_charge(self):
        ledger = ChargeLedger("R", {"v0": Fraction(1), "f0": Fraction(-1)})
        ledger.transfer("v0", "f0", Fraction(1, 2), "R5")
        assert ledger.charges == {"v0": Fraction(1, 2), "f0": Fraction(-1, 2)}
        assert ledger.transfers[0].to_record().amount == "1/2"

    def test_zero_transfer_not_recorded(self):
        ledger = ChargeLedger("R", {"v0": Fraction(0), "P": Fraction(0)})
        ledger.transfer("v0", "P", Fraction(0), "R6")
        assert ledger.transfers == []

    def test_unknown_account(self):
        ledger = ChargeLedger("R", {"v0": Fraction(0)})
        with pytest.raises(KeyError):
            ledger.transfer("v0", "v9", Fraction(1), "R1")

    def test_unknown_scheme(self, k4):
        with pytest.raises(ValueError):
            initial_charges(k4, "X")


class TestInitialCharges:
    @pytest.mark.parametrize("scheme, expected", [("R", -8), ("S", -12), ("T", -8)])
    def test_euler_totals(self, k4, scheme, expected):
        assert initial_charges(k4, scheme).total() == expected

    def test_scheme_s_values(self, k4):
        ledger = initial_charges(k4, "S")
        assert ledger.charges["v0"] == 3
        assert ledger.charges["f0"] == -6
        assert ledger.charges["P"] == 0

    def test_euler_totals_on_random_corpus(self):
        for emb in random_corpus(seed=21, count=40, max_n=14):
            assert initial_charges(emb, "R").total() == -8
            assert initial_charges(emb, "S").total() == -12


class TestSchemeR:
    def test_k4_without_precoloring(self, k4):
        """沒有 high 頂點、沒有組態：不會有任何轉移"""
        report = audit(k4, subgraph_from_items(), InstanceParams(delta=3, t=4), "R")
        assert report.transfers == []
        assert report.initial_total == report.final_total == "-8"
        assert report.ledger_ok
        assert len(report.negatives) == 8
        assert "P" not in report.negatives
        degree_sum = next(p for p in report.predicates if p.name == "degree-sum")
        assert degree_sum.status == "fails"
        assert len(degree_sum.failures) == 6
        assert _status(report, "score-bound") == "not-applicable"
        assert _status(report, "pot-count") == "not-applicable"

    def test_leaf_configuration_ledger(self, star3):
        """K1,3、H = 邊 01、t = 0"""
        report = audit(star3, subgraph_from_items(edges=[(0, 1)]), InstanceParams(delta=3, t=0), "R")
        assert report.final_charges == {
            "v0": "-6", "v1": "0", "v2": "0", "v3": "0", "f0": "1", "P": "-3", "C0": "0",
        }
        assert report.negatives == ["v0", "P"]
        assert [t.rule for t in report.transfers] == ["R2", "R2", "R3", "R3", "R6", "R6", "R6"]
        assert report.conserved

    def test_close_cliques_rejected(self, c4):
        with pytest.raises(HypothesisError):
            audit(c4, subgraph_from_items([0, 2]), InstanceParams(delta=2, t=4), "R")


class TestSchemeS:
    def test_requires_d(self, k4):
        with pytest.raises(HypothesisError):
            audit(k4, subgraph_from_items(), InstanceParams(delta=3, t=4), "S")

    def test_h_degree_above_d(self, path3):
        h = subgraph_from_items(edges=[(0, 1), (1, 2)])
        with pytest.raises(HypothesisError):
            audit(path3, h, InstanceParams(delta=2, t=4, d=1), "S")

    def test_k4_vertices_pay_faces(self, k4):
        """每個 3-面有 3 個度數 3 頂點，各付 2"""
        report = audit(k4, subgraph_from_items(), InstanceParams(delta=3, t=4, d=0), "S")
        assert report.final_charges["v0"] == "-3"
        assert report.final_charges["f0"] == "0"
        assert report.final_total == "-12"
        assert _status(report, "small-tilde-faces-empty") == "holds"


class TestSchemeT:
    def test_path_leaves_share_second_neighbor(self, path3):
        """兩片葉的第二鄰點重合：各付兩次 1/2"""
        report = audit(path3, subgraph_from_items(), InstanceParams(delta=2, t=4), "T")
        assert report.final_charges == {"v0": "-1", "v1": "-6", "v2": "-1", "f0": "-2", "P": "2"}
        assert sum(1 for t in report.transfers if t.rule == "T2") == 8
        assert any("第二鄰點都是 v2" in note for note in report.notes)
        assert report.ledger_ok

    def test_requires_matching(self, path3):
        h = subgraph_from_items(edges=[(0, 1), (1, 2)])
        with pytest.raises(HypothesisError):
            audit(path3, h, InstanceParams(delta=2, t=4), "T")

    def test_k4_pot(self, k4):
        report = audit(k4, subgraph_from_items(), InstanceParams(delta=3, t=4), "T")
        assert report.final_charges["P"] == "8"
        assert report.final_charges["v0"] == "-3"
        assert _status(report, "high-endpoint") == "fails"
        assert _status(report, "pot-count") == "holds"


class TestConservation:
    def test_apply_scheme_keeps_input_ledger(self, star3):
        initial = initial_charges(star3, "R")
        before = dict(initial.charges)
        apply_scheme(star3, subgraph_from_items(edges=[(0, 1)]), InstanceParams(delta=3, t=0), initial)
        assert initial.charges == before
        assert initial.transfers == []

    def test_replay_reproduces_final_charges(self, star3):
        h = subgraph_from_items(edges=[(0, 1)])
        initial = initial_charges(star3, "R")
        final = apply_scheme(star3, h, InstanceParams(delta=3, t=0), initial)
        assert replay(initial, final.transfers).charges == final.charges

    def test_random_instances_conserve_charge(self):
        rng = random.Random(17)
        for emb in random_corpus(seed=17, count=40, max_n=14):
            t = rng.randint(0, 5)
            params = InstanceParams(delta=emb.max_degree, t=t, d=2)
            for scheme, h in (
                ("R", random_clique_set(rng, emb)),
                ("S", random_bounded_degree_subgraph(rng, emb, 2)),
                ("T", random_bounded_degree_subgraph(rng, emb, 1)),
            ):
                report = audit(emb, h, params, scheme)
                assert report.ledger_ok, (scheme, report.initial_total, report.final_total)
                assert report.final_total == report.expected_total

"""
tests/unit/test_schemas.py - Pydantic schema unit tests
"""
import json

import pytest
from pydantic import ValidationError

from app.schemas import (
    AuditReport,
    DegreeClassification,
    InstanceParams,
    SharpnessCheck,
    SharpnessReport,
    SolveReport,
)


class TestInstanceParams:
    @pytest.mark.parametrize("delta, t, threshold", [(3, 4, 4), (3, 0, 2), (10, 3, 7), (0, 0, 0)])
    def test_high_threshold_rounds_up(self, delta, t, threshold):
        """門檻是 ⌈(Δ+t)/2⌉"""
        params = InstanceParams(delta=delta, t=t)
        assert params.high_threshold == threshold
        assert params.is_high(threshold)
        assert not params.is_high(threshold - 1)

    def test_rejects_negative_t(self):
        with pytest.raises(ValidationError):
            InstanceParams(delta=3, t=-1)

    def test_rejects_negative_d(self):
        with pytest.raises(ValidationError):
            InstanceParams(delta=3, t=4, d=-1)

    def test_threshold_is_serialized(self):
        data = json.loads(InstanceParams(delta=5, t=4, d=1).model_dump_json())
        assert data == {"delta": 5, "t": 4, "d": 1, "high_threshold": 5}


class TestDegreeClassification:
    def test_vertices_in_range(self):
        report = DegreeClassification(delta=4, buckets={1: [3, 0], 2: [1], 4: [2]}, range_bound=5, q=0)
        assert report.vertices_in_range(1, 2) == [0, 1, 3]
        assert report.vertices_in_range(3, 3) == []


class TestSharpnessReport:
    def test_unclaimed_check_does_not_disagree(self):
        report = SharpnessReport(
            example="subdivided-star",
            parameter=3,
            checks=[
                SharpnessCheck(palette=5, status="proven-impossible", nodes=0, expected="proven-impossible", agrees=True),
                SharpnessCheck(palette=6, status="colored", nodes=12),
            ],
        )
        assert report.all_agree
        assert not report.any_timeout

    def test_disagreement_and_timeout(self):
        report = SharpnessReport(
            example="greedy-tree",
            checks=[
                SharpnessCheck(palette=6, status="colored", nodes=9, expected="proven-impossible", agrees=False),
                SharpnessCheck(palette=7, status="timeout", nodes=100, expected="colored"),
            ],
        )
        assert not report.all_agree
        assert report.any_timeout


class TestSolveReport:
    def test_status_values(self):
        assert SolveReport(status="greedy-stuck", method="greedy").status == "greedy-stuck"
        with pytest.raises(ValidationError):
            SolveReport(status="unknown", method="exact")

    def test_field_order_is_stable(self):
        data = json.loads(SolveReport(status="timeout", method="exact").model_dump_json())
        assert list(data) == ["status", "method", "witness", "stuck_item", "nodes", "elapsed", "source"]


class TestAuditReport:
    def _report(self, conserved, euler_ok):
        return AuditReport(
            scheme="R",
            params=InstanceParams(delta=3, t=4),
            initial_total="-8",
            expected_total="-8",
            final_total="-8",
            conserved=conserved,
            euler_total_ok=euler_ok,
            transfers=[],
            final_charges={},
            negatives=[],
            predicates=[],
        )

    def test_ledger_ok(self):
        assert self._report(True, True).ledger_ok
        assert not self._report(False, True).ledger_ok
        assert not self._report(True, False).ledger_ok

    def test_rejects_unknown_scheme(self):
        with pytest.raises(ValidationError):
            AuditReport(**{**self._report(True, True).model_dump(), "scheme": "Q"})

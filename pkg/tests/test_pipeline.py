"""Condition report pipeline, state reducers and the worker pool."""
import pytest

from cks_toolkit.core.exceptions import BadParam
from cks_toolkit.models.conditions import CONDITION_NAMES
from cks_toolkit.models.growth import Status
from cks_toolkit.pipeline.state import merge_metadata, merge_notes
from cks_toolkit.services.report_service import _truncate, full_report
from cks_toolkit.services.growth import make_catalog
from cks_toolkit.services.sequences import bell_numbers, user_sequence
from cks_toolkit.services.worker_pool import ConditionWorkerPool


def test_merge_notes_handles_missing_sides():
    assert merge_notes(None, ["a"]) == ["a"]
    assert merge_notes(["a"], None) == ["a"]
    assert merge_notes(["a"], ["b", "c"]) == ["a", "b", "c"]


def test_merge_metadata_right_wins():
    assert merge_metadata({"x": 1, "y": 2}, {"y": 3}) == {"x": 1, "y": 3}
    assert merge_metadata(None, None) == {}


def test_pool_keeps_input_order():
    pool = ConditionWorkerPool(max_workers=3)
    try:
        assert pool.map_ordered(lambda x: x * x, range(6)) == [0, 1, 4, 9, 16, 25]
    finally:
        pool.shutdown()


def test_pool_propagates_errors():
    pool = ConditionWorkerPool(max_workers=2)

    def boom(x):
        if x == 2:
            raise ValueError("two")
        return x

    try:
        with pytest.raises(ValueError, match="two"):
            pool.map_ordered(boom, range(4))
    finally:
        pool.shutdown()


def test_pool_refuses_work_after_shutdown():
    pool = ConditionWorkerPool(max_workers=1)
    pool.shutdown()
    with pytest.raises(RuntimeError):
        pool.map_ordered(str, [1])


def test_sequence_report_skips_u_evidence():
    report = full_report(user_sequence([0.0] * 21, descriptor="ones"))
    assert list(report.entries) == list(CONDITION_NAMES)
    assert report.N == 20
    assert report.provenance == "user"
    assert report.u_evidence is None
    assert report.hypotheses_met is None
    assert "sequence subject: U-conditions not applicable" in report.notes
    assert report.entries["A1"].status == Status.PASS


def test_sequence_report_truncates():
    report = full_report(user_sequence([0.0] * 21), N=10)
    assert report.N == 10


def test_truncate_rejects_longer_depth():
    with pytest.raises(BadParam):
        _truncate(user_sequence([0.0] * 5), 8)


@pytest.mark.slow
def test_growth_report_for_ks0(ks0):
    report = full_report(ks0, 20)
    assert list(report.entries) == list(CONDITION_NAMES)
    assert report.provenance == "growth"
    assert report.entries["A1"].status == Status.PASS
    assert report.inconsistencies == []
    assert report.hypotheses_met is True
    assert len(report.u_evidence) == 4


@pytest.mark.slow
@pytest.mark.parametrize("beta", [0.0, 0.5])
def test_power_family_report(beta):
    report = full_report(make_catalog("ks", {"beta": beta}), 100)
    for name in ("A1", "A2", "A2_tilde", "B2_near", "B2_tilde", "B1_tilde", "C1", "C2", "C3"):
        assert report.status_of(name) == Status.PASS, name
    assert report.entries["C3"].constant <= 2.0 * (1 + 1e-6)
    assert report.entries["C2"].constant <= 4.0 * (1 + 1e-6)
    assert report.inconsistencies == []


@pytest.mark.slow
def test_bell_report():
    report = full_report(bell_numbers(2, 60), 60)
    for name in ("A1", "A2", "B1", "B2", "B3", "C1", "C2", "C3"):
        assert report.status_of(name) == Status.PASS, name
    assert report.entries["B1"].note.startswith("orders 1..")

import pytest

from gops import run_bench
from gops.encodings import CoverProblem, encode_max_k_cover
from gops.errors import BoundViolationError


def test_empty_suite_gives_empty_report():
    report = run_bench([])
    assert report.records == []
    assert report.violations == []
    assert report.to_json()["records"] == []
    assert "timings:" in report.to_text()


def test_bound_inapplicable_instance_not_asserted():
    # k = 1 < 2 - delta: the guarantee does not apply, so even a poor ratio
    # must not fail the run
    inst = encode_max_k_cover(CoverProblem(
        universe=(1, 2, 3, 4, 5, 6),
        families=(frozenset({1, 2, 3}), frozenset({4, 5, 6}), frozenset({1, 2, 4, 5})),
        k=1))
    report = run_bench([("one", inst)])
    record = report.records[0]
    assert not record.bound_applicable
    assert record.within_bound  # vacuously
    assert report.violations == []


def test_records_sorted_by_id():
    insts = [(f"z{9 - i}", encode_max_k_cover(CoverProblem(
        universe=(1, 2), families=(frozenset({1}), frozenset({2})), k=2)))
        for i in range(3)]
    report = run_bench(insts)
    ids = [r.instance_id for r in report.records]
    assert ids == sorted(ids)


def test_non_bmgop_suite_entry_rejected():
    from helpers import tiny_gbgop
    with pytest.raises(BoundViolationError):
        run_bench([("bad", tiny_gbgop())])

import pytest

from funtf.cores import CoreTable
from funtf.verify import CheckResult, Suite, random_basis_n3, random_spanning


@pytest.fixture(scope="module")
def suite():
    return Suite("fast", seed=0)


@pytest.mark.parametrize("name", ["enumeration", "oracle_agreement", "kmatrix", "incidence", "not_spanning",
                                  "trace_identity", "dimensions"])
def test_cheap_checks_pass(suite, name):
    res = getattr(suite, name)()
    assert res.passed, res.line()
    assert res.line().startswith("[PASS]")


def test_unknown_column_check_reports_failure(suite):
    res = suite.unknown_column()
    assert not res.passed
    assert "known column 10/10" in res.detail


def test_example_uses_loaded_table(n3_classification):
    records, _ = n3_classification
    s = Suite("fast", table=CoreTable.from_records(3, records, [5, 6], 0))
    res = s.example()
    assert res.passed and "table=128" in res.detail
    assert s.solver().passed


def test_solver_check_needs_fibers():
    assert not Suite("fast").solver().passed


def test_scope_validated():
    with pytest.raises(ValueError):
        Suite("medium")


def test_helpers():
    import numpy as np

    rng = np.random.default_rng(0)
    e = random_basis_n3(6, rng, min_k=2)
    assert e.size == 7
    assert len(random_spanning(3, 5, 3, rng)) == 3
    assert CheckResult(1, "x", True).to_dict()["passed"]

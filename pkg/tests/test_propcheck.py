import pytest

from factlat import propcheck
from factlat.propcheck import Check, CHECKS, run_suite


def test_every_suite_has_checks():
    assert {c.suite for c in CHECKS} == set(propcheck.SUITES)


@pytest.mark.parametrize("n", [1, 2, 6, 8])
def test_all_suites_pass(n):
    results = run_suite("all", n, 3, seed=5)
    assert results and all(r.status in ("pass", "skip") for r in results)


def test_divisibility_skips():
    results = {r.name: r.status for r in run_suite("eqstar", 6, 2, seed=0)}
    assert results["galois_laws"] == "skip"
    assert results["cycles_partition_ground"] == "pass"


def test_none_suite_is_empty():
    assert run_suite("none", 4, 10, seed=0) == []


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("bogus", 4, 1, seed=0)


def test_failure_shrinks_to_smallest_size(monkeypatch):
    broken = Check("breaks_from_five", "partitions", lambda n: n >= 1,
                   lambda n, rng: {"n": n} if n >= 5 else None)
    monkeypatch.setattr(propcheck, "CHECKS", [broken])
    [result] = run_suite("partitions", 9, 4, seed=1)
    assert result.status == "fail" and result.trials == 1
    assert result.witness["n"] == 5 and result.witness["witness"] == {"n": 5}


def test_exceptions_count_as_failures(monkeypatch):
    def boom(n, rng):
        raise RuntimeError("nope")
    monkeypatch.setattr(propcheck, "CHECKS", [Check("boom", "factlat", lambda n: True, boom)])
    [result] = run_suite("factlat", 3, 2, seed=0)
    assert result.status == "fail" and result.witness["witness"]["error"] == "RuntimeError"


def test_deterministic():
    a = [r.as_dict() for r in run_suite("factlat", 6, 5, seed=11)]
    b = [r.as_dict() for r in run_suite("factlat", 6, 5, seed=11)]
    assert a == b

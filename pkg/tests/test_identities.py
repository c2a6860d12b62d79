import json
import os

import pytest

from floorprimes import identities as ids
from floorprimes.primal import PrimeSieve
from oracles import G_oracle, trial_factor


@pytest.mark.parametrize(
    "x,cls",
    [
        (9, ids.ODD_SEMIPRIME),
        (105, ids.THREE_DISTINCT),
        (12, ids.OTHER),
        (7, ids.PRIME),
        (2, ids.PRIME),
        (6, ids.OTHER),
        (45, ids.OTHER),
        (1155, ids.OTHER),
        (27, ids.OTHER),
    ],
)
def test_classify(x, cls):
    got, factors = ids.classify(x)
    assert got == cls
    assert list(factors) == trial_factor(x)


def test_classify_rejects_one():
    with pytest.raises(ValueError):
        ids.classify(1)


@pytest.mark.parametrize("p,g_x,g_prev,predicted", [(5, 2, 1, 1), (3, 1, 1, None), (13, 3, 2, 1), (2, 1, 0, 1)])
def test_check_prime_step(p, g_x, g_prev, predicted):
    rec = ids.check_prime_step(p)
    assert (rec.g_x, rec.g_prev, rec.predicted) == (g_x, g_prev, predicted)
    assert rec.delta == g_x - g_prev
    assert rec.agrees is (None if predicted is None else True)


def test_check_prime_step_rejects_composites():
    with pytest.raises(ids.ClassMismatch):
        ids.check_prime_step(9)


@pytest.mark.parametrize("x,g_x,g_prev", [(9, 2, 1), (15, 4, 3), (25, 3, 2)])
def test_check_semiprime_step(x, g_x, g_prev):
    rec = ids.check_semiprime_step(x)
    assert (rec.g_x, rec.g_prev) == (g_x, g_prev) == (G_oracle(x), G_oracle(x - 1))
    assert rec.predicted == 1 and rec.agrees


@pytest.mark.parametrize("x", [10, 7, 105, 45])
def test_check_semiprime_step_rejects(x):
    with pytest.raises(ids.ClassMismatch):
        ids.check_semiprime_step(x)


@pytest.mark.parametrize("x,predicted", [(105, 0), (255, 1)])
def test_check_conjecture4(x, predicted):
    rec = ids.check_conjecture4(x)
    assert rec.predicted == predicted
    assert rec.delta == G_oracle(x) - G_oracle(x - 1)


def test_check_conjecture4_rejects_four_factors():
    with pytest.raises(ids.ClassMismatch):
        ids.check_conjecture4(1155)


def test_record_invariants_and_roundtrip():
    for x in [2, 3, 9, 12, 105, 255, 1155]:
        rec = ids.check(x)
        assert rec.delta == rec.g_x - rec.g_prev
        assert (rec.predicted is None) == (rec.cls == ids.OTHER or x == 3)
        d = rec.to_dict()
        assert ids.DeltaRecord.from_dict(json.loads(json.dumps(d))) == rec


def test_scan_primes_to_1e4():
    r = ids.scan(2, 10**4, "prime")
    assert r.records_checked == 1229
    assert r.predicted_count == 1228
    assert r.agreement_count == 1228
    assert r.counterexamples == []


def test_scan_semiprimes_to_1e4():
    r = ids.scan(2, 10**4, "odd_semiprime")
    assert r.counterexamples == []
    assert r.records_checked == sum(
        1 for x in range(3, 10**4 + 1, 2) if sum(e for _, e in trial_factor(x)) == 2
    )


def test_scan_empty_range():
    r = ids.scan(10, 9, "prime")
    assert r.records_checked == 0 and r.counterexamples == []


def test_scan_all_filter_counts_every_x():
    r = ids.scan(2, 500, "all", checkpoint_every=77)
    assert r.records_checked == 499
    assert r.counterexamples == []


def test_scan_report_invariant():
    r = ids.scan(2, 20000, "conjecture4", checkpoint_every=3000)
    assert r.agreement_count + len(r.counterexamples) == r.predicted_count
    assert sum(n for n, _ in r.by_prediction.values()) == r.predicted_count


def test_scan_rejects_unknown_filter():
    with pytest.raises(ValueError):
        ids.scan(2, 10, "twin")


def test_scan_worker_count_does_not_change_report():
    one = ids.scan(2, 30000, "conjecture4", workers=1, checkpoint_every=7000)
    many = ids.scan(2, 30000, "conjecture4", workers=8, checkpoint_every=7000)
    assert one.to_json() == many.to_json()


def test_scan_reports_injected_counterexample(monkeypatch):
    # corrupt G for one value and check it surfaces as a theorem failure
    real = ids.G

    def broken(x, sieve=None):
        return real(x, sieve) + (1 if x == 101 else 0)

    monkeypatch.setattr(ids, "G", broken)
    r = ids.scan(2, 200, "prime")
    assert [c.x for c in r.counterexamples] == [101]
    assert r.theorem_failures and r.theorem_failures[0].delta == 2


class Interrupt(Exception):
    pass


def test_checkpoint_resume_identical(tmp_path):
    ckpt = str(tmp_path / "scan.json")
    full = ids.scan(2, 25000, "conjecture4", checkpoint_every=4000)
    calls = []

    def stop_after_two(window, total, last_x):
        calls.append(last_x)
        if len(calls) == 2:
            raise Interrupt

    with pytest.raises(Interrupt):
        ids.scan(2, 25000, "conjecture4", checkpoint=ckpt, checkpoint_every=4000, on_chunk=stop_after_two)
    data = json.loads(open(ckpt).read())
    assert data["last_completed_x"] == calls[-1]
    for key in ("schema_version", "range", "filter", "last_completed_x", "checked", "agreement_count", "counterexamples"):
        assert key in data
    resumed = ids.scan(2, 25000, "conjecture4", checkpoint=ckpt, resume=True, checkpoint_every=4000, workers=3)
    assert resumed.to_json() == full.to_json()


def test_resume_refuses_mismatched_checkpoint(tmp_path):
    ckpt = str(tmp_path / "scan.json")
    ids.scan(2, 1000, "prime", checkpoint=ckpt)
    with pytest.raises(ids.CheckpointMismatch):
        ids.scan(2, 2000, "prime", checkpoint=ckpt, resume=True)
    with pytest.raises(ids.CheckpointMismatch):
        ids.scan(2, 1000, "odd_semiprime", checkpoint=ckpt, resume=True)


def test_checkpoint_write_failure_keeps_previous(tmp_path, monkeypatch):
    ckpt = str(tmp_path / "scan.json")
    ids.scan(2, 1000, "prime", checkpoint=ckpt)
    before = open(ckpt).read()

    def fail(*a, **k):
        raise OSError("disk full")

    monkeypatch.setattr(ids.json, "dump", fail)
    with pytest.raises(OSError):
        ids.scan(2, 1000, "prime", checkpoint=ckpt)
    assert open(ckpt).read() == before
    assert [f for f in os.listdir(tmp_path) if f.startswith(".ckpt-")] == []


def test_square_case_identities():
    for p in PrimeSieve(316).primes().tolist()[1:]:
        assert ids.square_case_holds(p)


def test_distinct_case_identities():
    primes = PrimeSieve(10**5 // 3).primes().tolist()[1:]
    checked = 0
    for i, p in enumerate(primes):
        for q in primes[i + 1 :]:
            if p * q > 10**5:
                break
            assert ids.distinct_case_holds(p, q), (p, q)
            checked += 1
    assert checked > 1000

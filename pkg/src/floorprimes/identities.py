"""Step identities G(x) - G(x - 1) for structured x, and resumable range scans.

Predicted steps:

* x prime, x != 3: +1 (proven)
* x = p q, p and q odd primes, possibly equal: +1 (proven)
* x = p1 p2 p3, 2 < p1 < p2 < p3: 0 when p1 p2 > p3, +1 when p1 p2 < p3
  (conjectural; disagreements are findings, not failures)
"""
from __future__ import annotations

import json
import logging
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .floorset import G
from .primal import (
    PrimeSieve,
    factorize,
    factorize_with_table,
    is_prime,
    smallest_factor_table,
)

log = logging.getLogger(__name__)

PRIME = "prime"
ODD_SEMIPRIME = "odd_semiprime"
THREE_DISTINCT = "three_distinct_odd_primes"
OTHER = "other"
CLASSES = (PRIME, ODD_SEMIPRIME, THREE_DISTINCT, OTHER)

# scan filters: the three structured classes, or every x
FILTERS = {
    "theorem2": PRIME,
    "theorem3": ODD_SEMIPRIME,
    "conjecture4": THREE_DISTINCT,
    PRIME: PRIME,
    ODD_SEMIPRIME: ODD_SEMIPRIME,
    THREE_DISTINCT: THREE_DISTINCT,
    "all": "all",
}
PROVEN = (PRIME, ODD_SEMIPRIME)

SCHEMA_VERSION = 1
DEFAULT_CHECKPOINT_EVERY = 100_000
# SPF table above this size is not built; classification falls back to factorize().
SPF_TABLE_CEILING = 50_000_000


class ClassMismatch(ValueError):
    """A checker was handed an x outside its class."""


class CheckpointMismatch(ValueError):
    """A checkpoint describes a different scan than the one requested."""


@dataclass(frozen=True)
class DeltaRecord:
    x: int
    cls: str
    factors: tuple[tuple[int, int], ...]
    g_x: int
    g_prev: int
    predicted: int | None = None

    @property
    def delta(self) -> int:
        return self.g_x - self.g_prev

    @property
    def agrees(self) -> bool | None:
        if self.predicted is None:
            return None
        return self.delta == self.predicted

    def to_dict(self) -> dict:
        return {
            "x": self.x,
            "class": self.cls,
            "factors": [list(f) for f in self.factors],
            "g_x": self.g_x,
            "g_prev": self.g_prev,
            "delta": self.delta,
            "predicted": self.predicted,
            "agrees": self.agrees,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DeltaRecord":
        return cls(
            x=d["x"],
            cls=d["class"],
            factors=tuple(tuple(f) for f in d["factors"]),
            g_x=d["g_x"],
            g_prev=d["g_prev"],
            predicted=d["predicted"],
        )


def classify_factors(factors: Iterable[tuple[int, int]]) -> str:
    factors = list(factors)
    omega = sum(e for _, e in factors)
    if omega == 1:
        return PRIME
    if any(p == 2 for p, _ in factors):
        return OTHER
    if omega == 2:
        return ODD_SEMIPRIME
    if omega == 3 and len(factors) == 3:
        return THREE_DISTINCT
    return OTHER


def classify(x: int) -> tuple[str, tuple[tuple[int, int], ...]]:
    if x < 2:
        raise ValueError("classify requires x >= 2")
    factors = tuple(factorize(x))
    return classify_factors(factors), factors


def _conjecture_prediction(factors) -> int:
    p1, p2, p3 = (p for p, _ in factors)
    # p1 p2 == p3 cannot happen for distinct primes
    return 0 if p1 * p2 > p3 else 1


def _predict(cls: str, x: int, factors) -> int | None:
    if cls == PRIME:
        return None if x == 3 else 1
    if cls == ODD_SEMIPRIME:
        return 1
    if cls == THREE_DISTINCT:
        return _conjecture_prediction(factors)
    return None


def make_record(x: int, cls: str, factors, sieve: PrimeSieve | None = None) -> DeltaRecord:
    return DeltaRecord(
        x=x,
        cls=cls,
        factors=tuple(tuple(f) for f in factors),
        g_x=G(x, sieve),
        g_prev=G(x - 1, sieve) if x > 1 else 0,
        predicted=_predict(cls, x, factors),
    )


def check_prime_step(p: int, sieve: PrimeSieve | None = None) -> DeltaRecord:
    if not is_prime(p):
        raise ClassMismatch(f"{p} is not prime")
    return make_record(p, PRIME, ((p, 1),), sieve)


def check_semiprime_step(x: int, sieve: PrimeSieve | None = None) -> DeltaRecord:
    cls, factors = classify(x)
    if cls != ODD_SEMIPRIME:
        raise ClassMismatch(f"{x} is {cls}, not an odd semiprime")
    return make_record(x, cls, factors, sieve)


def check_conjecture4(x: int, sieve: PrimeSieve | None = None) -> DeltaRecord:
    cls, factors = classify(x)
    if cls != THREE_DISTINCT:
        raise ClassMismatch(f"{x} is {cls}, not a product of three distinct odd primes")
    return make_record(x, cls, factors, sieve)


def check(x: int, sieve: PrimeSieve | None = None) -> DeltaRecord:
    cls, factors = classify(x)
    return make_record(x, cls, factors, sieve)


# ---------------------------------------------------------------------------
# scanning


@dataclass
class ScanReport:
    lo: int
    hi: int
    filter: str
    records_checked: int = 0
    predicted_count: int = 0
    agreement_count: int = 0
    counterexamples: list[DeltaRecord] = field(default_factory=list)
    # predicted step -> [checked, agreeing]
    by_prediction: dict[int, list[int]] = field(default_factory=dict)

    def absorb(self, other: "ScanReport") -> None:
        self.records_checked += other.records_checked
        self.predicted_count += other.predicted_count
        self.agreement_count += other.agreement_count
        self.counterexamples.extend(other.counterexamples)
        for k, (n, a) in other.by_prediction.items():
            cur = self.by_prediction.setdefault(k, [0, 0])
            cur[0] += n
            cur[1] += a

    def add(self, rec: DeltaRecord) -> None:
        self.records_checked += 1
        if rec.predicted is None:
            return
        self.predicted_count += 1
        tally = self.by_prediction.setdefault(rec.predicted, [0, 0])
        tally[0] += 1
        if rec.agrees:
            self.agreement_count += 1
            tally[1] += 1
        else:
            self.counterexamples.append(rec)

    @property
    def theorem_failures(self) -> list[DeltaRecord]:
        return [r for r in self.counterexamples if r.cls in PROVEN]

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "range": [self.lo, self.hi],
            "filter": self.filter,
            "records_checked": self.records_checked,
            "predicted_count": self.predicted_count,
            "agreement_count": self.agreement_count,
            "by_prediction": {str(k): v for k, v in sorted(self.by_prediction.items())},
            "counterexamples": [r.to_dict() for r in self.counterexamples],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _classifier(hi: int):
    if hi <= SPF_TABLE_CEILING:
        spf = smallest_factor_table(hi)

        def factors_of(x: int):
            return factorize_with_table(x, spf)

        return factors_of
    return factorize


_worker_state: dict = {}


def _worker_init(hi: int) -> None:
    _worker_state.clear()
    _worker_state["hi"] = hi
    _worker_state["sieve"] = PrimeSieve(max(hi, 2))
    _worker_state["factors_of"] = _classifier(hi)


def _scan_chunk(args: tuple[int, int, str, int]) -> ScanReport:
    lo, hi, flt, top = args
    if _worker_state.get("hi") != top:
        _worker_init(top)
    sieve: PrimeSieve = _worker_state["sieve"]
    factors_of = _worker_state["factors_of"]
    report = ScanReport(lo, hi, flt)
    if flt == PRIME:
        candidates = sieve.primes(hi)
        candidates = candidates[np.searchsorted(candidates, lo) :].tolist()
    else:
        candidates = range(lo, hi + 1)
    for x in candidates:
        if flt == PRIME:
            factors = ((x, 1),)
            cls = PRIME
        else:
            if flt == ODD_SEMIPRIME or flt == THREE_DISTINCT:
                if x % 2 == 0:
                    continue
            factors = tuple(factors_of(x))
            cls = classify_factors(factors)
            if flt != "all" and cls != flt:
                continue
        report.add(make_record(x, cls, factors, sieve))
    return report


def _split(lo: int, hi: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, hi - lo + 1))
    edges = np.linspace(lo, hi + 1, parts + 1).astype(np.int64).tolist()
    return [(a, b - 1) for a, b in zip(edges, edges[1:]) if b > a]


def _identity(lo: int, hi: int, flt: str) -> dict:
    return {"schema_version": SCHEMA_VERSION, "range": [lo, hi], "filter": flt}


def write_checkpoint(path: str, report: ScanReport, last_completed_x: int) -> None:
    """Atomically replace ``path`` (temp file in the same directory, then rename)."""
    payload = _identity(report.lo, report.hi, report.filter)
    payload.update(
        last_completed_x=last_completed_x,
        checked=report.records_checked,
        predicted_count=report.predicted_count,
        agreement_count=report.agreement_count,
        by_prediction={str(k): v for k, v in sorted(report.by_prediction.items())},
        counterexamples=[r.to_dict() for r in report.counterexamples],
    )
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".ckpt-", dir=directory)
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(payload, fh, sort_keys=True)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_checkpoint(path: str, lo: int, hi: int, flt: str) -> tuple[ScanReport, int]:
    with open(path) as fh:
        data = json.load(fh)
    want = _identity(lo, hi, flt)
    got = {k: data.get(k) for k in want}
    if got != want:
        raise CheckpointMismatch(f"checkpoint {path} is for {got}, requested {want}")
    report = ScanReport(
        lo,
        hi,
        flt,
        records_checked=data["checked"],
        predicted_count=data["predicted_count"],
        agreement_count=data["agreement_count"],
        counterexamples=[DeltaRecord.from_dict(d) for d in data["counterexamples"]],
        by_prediction={int(k): list(v) for k, v in data["by_prediction"].items()},
    )
    return report, data["last_completed_x"]


def scan(
    lo: int,
    hi: int,
    flt: str = PRIME,
    *,
    workers: int = 1,
    checkpoint: str | None = None,
    resume: bool = False,
    checkpoint_every: int = DEFAULT_CHECKPOINT_EVERY,
    on_chunk: Callable[[ScanReport, ScanReport, int], None] | None = None,
) -> ScanReport:
    """Check every x in [lo, hi] matching ``flt``.

    Work proceeds in windows of ``checkpoint_every`` consecutive x; each
    window is split across ``workers`` processes and merged in range order,
    so the report does not depend on the worker count.  After each window the
    checkpoint (if any) is rewritten and ``on_chunk(window, total, last_x)``
    is called.
    """
    if flt not in FILTERS:
        raise ValueError(f"unknown filter {flt!r}")
    flt = FILTERS[flt]
    if hi < lo:
        return ScanReport(lo, hi, flt)
    if lo < 2:
        raise ValueError("scan range must start at x >= 2")
    if checkpoint_every < 1:
        raise ValueError("checkpoint_every must be >= 1")

    report = ScanReport(lo, hi, flt)
    start = lo
    if resume and checkpoint and os.path.exists(checkpoint):
        report, last = load_checkpoint(checkpoint, lo, hi, flt)
        start = last + 1
        log.info("resuming %s scan at x=%d", flt, start)

    pool = ProcessPoolExecutor(workers, initializer=_worker_init, initargs=(hi,)) if workers > 1 else None
    try:
        while start <= hi:
            stop = min(hi, start + checkpoint_every - 1)
            pieces = [(a, b, flt, hi) for a, b in _split(start, stop, workers)]
            parts = pool.map(_scan_chunk, pieces) if pool else map(_scan_chunk, pieces)
            window = ScanReport(start, stop, flt)
            for part in parts:
                window.absorb(part)
            report.absorb(window)
            if checkpoint:
                write_checkpoint(checkpoint, report, stop)
            if on_chunk:
                on_chunk(window, report, stop)
            start = stop + 1
    finally:
        if pool:
            pool.shutdown()
    return report


# ---------------------------------------------------------------------------
# floor identities used inside the semiprime argument


def square_case_holds(p: int) -> bool:
    """x = p**2: (x-1)//p == p-1 and (x-1)//(p-1) == p+1."""
    x = p * p
    return (x - 1) // p == p - 1 and (x - 1) // (p - 1) == p + 1


def distinct_case_holds(p: int, q: int) -> bool:
    """x = p q, p < q: (x-1)//(q-1) == p, (x-1)//p == q-1, (x-1)//(p-1) > q."""
    x = p * q
    return (x - 1) // (q - 1) == p and (x - 1) // p == q - 1 and (x - 1) // (p - 1) > q

"""The floor-function set {x // n : 1 <= n <= x} and its prime statistics.

Fast paths touch only the O(sqrt x) distinct quotients.  Every fast count has
a literal O(x) twin (``*_bruteforce``) guarded by an oracle ceiling.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .primal import (
    PrimeSieve,
    check_u64,
    is_prime_many,
    prime_power_flags,
    shared_sieve,
)

DEFAULT_ORACLE_CEILING = 10_000_000


class OracleCeilingError(ValueError):
    """An O(x) oracle was asked for x above the configured ceiling."""


def oracle_ceiling() -> int:
    return int(os.environ.get("FLOORSET_ORACLE_CEILING", DEFAULT_ORACLE_CEILING))


def _check_x(x: int) -> int:
    x = check_u64(x, "x")
    if x < 1:
        raise ValueError("x must be >= 1")
    return x


def _guard(x: int, ceiling: int | None) -> int:
    x = _check_x(x)
    limit = oracle_ceiling() if ceiling is None else ceiling
    if x > limit:
        raise OracleCeilingError(f"x={x} exceeds oracle ceiling {limit}")
    return x


@dataclass(frozen=True)
class FloorBlock:
    """Maximal run n_lo..n_hi on which x // n == v."""

    v: int
    n_lo: int
    n_hi: int

    def __len__(self) -> int:
        return self.n_hi - self.n_lo + 1


@dataclass(frozen=True)
class FloorSetSummary:
    x: int
    distinct_count: int
    prime_count_G: int
    index_count_F: int
    prime_power_index_count: int


def iter_blocks(x: int) -> Iterator[FloorBlock]:
    """Blocks in order of increasing n (so decreasing v)."""
    x = _check_x(x)
    n = 1
    while n <= x:
        v = x // n
        hi = x // v
        yield FloorBlock(v, n, hi)
        n = hi + 1


def _dtype_for(x: int):
    return np.uint64 if x >= 1 << 63 else np.int64


def distinct_array(x: int) -> np.ndarray:
    """Distinct quotients x // n in increasing order, as an array."""
    x = _check_x(x)
    s = math.isqrt(x)
    dt = _dtype_for(x)
    # every v <= s occurs (at n = x // v); above s they are x // n for n <= s
    small = np.arange(1, s + 1, dtype=dt)
    large = (np.asarray(x, dtype=dt) // np.arange(s, 0, -1, dtype=dt)).astype(dt)
    if x // s == s:
        large = large[1:]
    return np.concatenate([small, large])


def distinct_values(x: int) -> list[int]:
    return distinct_array(x).tolist()


def block_arrays(x: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(v, n_lo, n_hi) for every block, ordered by increasing n."""
    v = distinct_array(x)[::-1]
    dt = v.dtype
    n_hi = np.asarray(x, dtype=dt) // v
    n_lo = np.empty_like(n_hi)
    n_lo[0] = 1
    n_lo[1:] = n_hi[:-1] + 1
    return v, n_lo, n_hi


def _sieve_for(x: int, sieve: PrimeSieve | None) -> PrimeSieve | None:
    if sieve is not None:
        return sieve
    # Cover everything up to 2^24 by table; beyond that mix table + Miller-Rabin.
    return shared_sieve(min(x, 1 << 24))


def G(x: int, sieve: PrimeSieve | None = None) -> int:
    """Number of primes among the distinct values of x // n."""
    values = distinct_array(x)
    return int(np.count_nonzero(is_prime_many(values, _sieve_for(x, sieve))))


def F(x: int, sieve: PrimeSieve | None = None) -> int:
    """Number of n <= x with x // n prime."""
    v, n_lo, n_hi = block_arrays(x)
    mask = is_prime_many(v, _sieve_for(x, sieve))
    return int((n_hi[mask] - n_lo[mask] + 1).sum())


def F_primepower(x: int, sieve: PrimeSieve | None = None) -> int:
    """Number of n <= x with x // n a prime power (1 excluded)."""
    v, n_lo, n_hi = block_arrays(x)
    mask = is_prime_many(v, _sieve_for(x, sieve)) | np.isin(v, proper_prime_powers(x))
    return int((n_hi[mask] - n_lo[mask] + 1).sum())


def proper_prime_powers(limit: int) -> np.ndarray:
    """Sorted p**k <= limit with k >= 2."""
    out = []
    for p in shared_sieve(max(math.isqrt(limit), 2)).primes(math.isqrt(limit)).tolist():
        q = p * p
        while q <= limit:
            out.append(q)
            q *= p
    out.sort()
    return np.array(out, dtype=_dtype_for(limit))


def summarize(x: int, sieve: PrimeSieve | None = None) -> FloorSetSummary:
    return FloorSetSummary(
        x=x,
        distinct_count=len(distinct_array(x)),
        prime_count_G=G(x, sieve),
        index_count_F=F(x, sieve),
        prime_power_index_count=F_primepower(x, sieve),
    )


def threshold_b(x: int) -> tuple[float, int]:
    """(b, floor(b)) for b = (sqrt(4x + 1) - 1) / 2; the floor is exact."""
    x = _check_x(x)
    m = 4 * x + 1
    return (math.sqrt(m) - 1) / 2, (math.isqrt(m) - 1) // 2


def below_threshold(p: int, x: int) -> bool:
    """True iff p < b(x), decided exactly: b solves b(b + 1) = x."""
    return p * (p + 1) < x


# ---------------------------------------------------------------------------
# O(x) oracles


class BruteForceTables:
    """Primality and prime-power lookup tables shared by the O(x) oracles."""

    def __init__(self, limit: int):
        self.limit = limit
        sieve = PrimeSieve(max(limit, 1))
        self.prime = sieve.flags()
        self.prime_power = prime_power_flags(limit, sieve)
        self.sieve = sieve


_tables: BruteForceTables | None = None


def brute_tables(limit: int) -> BruteForceTables:
    global _tables
    if _tables is None or _tables.limit < limit:
        _tables = BruteForceTables(limit)
    return _tables


def _quotients(x: int) -> np.ndarray:
    dt = np.int32 if x < 2**31 else np.int64
    return np.asarray(x, dtype=dt) // np.arange(1, x + 1, dtype=dt)


def bruteforce_all(x: int, ceiling: int | None = None, tables: BruteForceTables | None = None) -> tuple[int, int, int]:
    """(G, F, F_primepower) from the literal list x // 1, ..., x // x."""
    x = _guard(x, ceiling)
    t = tables or brute_tables(x)
    q = _quotients(x)
    present = np.zeros(x + 1, dtype=bool)
    present[q] = True
    g = int(np.count_nonzero(present & t.prime[: x + 1]))
    f = int(np.count_nonzero(t.prime[q]))
    fpp = int(np.count_nonzero(t.prime_power[q]))
    return g, f, fpp


def G_bruteforce(x: int, ceiling: int | None = None) -> int:
    return bruteforce_all(x, ceiling)[0]


def F_bruteforce(x: int, ceiling: int | None = None) -> int:
    return bruteforce_all(x, ceiling)[1]


def F_primepower_bruteforce(x: int, ceiling: int | None = None) -> int:
    return bruteforce_all(x, ceiling)[2]


def G_via_delta(x: int, sieve: PrimeSieve | None = None, ceiling: int | None = None) -> int:
    """Count primes p <= x with x // p - x // (p + 1) > 0."""
    x = _guard(x, ceiling)
    if sieve is None or sieve.limit < x:
        sieve = shared_sieve(x)
    p = sieve.primes(x)
    return int(np.count_nonzero(x // p - x // (p + 1) > 0))


def delta_steps(x: int, primes: np.ndarray) -> np.ndarray:
    """x // p - x // (p + 1) for each p in ``primes``."""
    return x // primes - x // (primes + 1)

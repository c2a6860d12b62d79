"""Prime infrastructure: sieving, primality, prime powers, Mobius, factorization.

Everything here is exact over unsigned 64-bit integers.  Values covered by a
:class:`PrimeSieve` are answered by table lookup; larger values go through a
deterministic Miller-Rabin test whose witness set is proven for n < 3.3e24.
"""
from __future__ import annotations

import math
import os
from functools import lru_cache
from typing import Iterable

import numpy as np

U64_MAX = (1 << 64) - 1

# Hard cap on sieve size (flags); override with FLOORSET_SIEVE_CEILING.
DEFAULT_SIEVE_CEILING = 2_000_000_000

# Proven deterministic for all n < 3,317,044,064,679,887,385,961,981.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_TRIAL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def sieve_ceiling() -> int:
    return int(os.environ.get("FLOORSET_SIEVE_CEILING", DEFAULT_SIEVE_CEILING))


def check_u64(n: int, name: str = "n") -> int:
    """Reject anything outside [0, 2**64 - 1]; return ``n`` as a Python int."""
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise TypeError(f"{name} must be an integer, got {type(n).__name__}")
    n = int(n)
    if n < 0 or n > U64_MAX:
        raise ValueError(f"{name}={n} outside the supported 64-bit unsigned range")
    return n


class PrimeSieve:
    """Bit-packed primality flags over [0, limit].

    Immutable after construction, so one instance can be shared freely
    (including across forked worker processes).
    """

    __slots__ = ("limit", "_bits", "_primes")

    def __init__(self, limit: int):
        limit = check_u64(limit, "limit")
        if limit < 1:
            raise ValueError("sieve limit must be >= 1")
        ceiling = sieve_ceiling()
        if limit > ceiling:
            raise ValueError(f"sieve limit {limit} exceeds memory ceiling {ceiling}")
        self.limit = limit
        flags = _eratosthenes(limit)
        self._bits = np.packbits(flags, bitorder="little")
        self._bits.setflags(write=False)
        self._primes: np.ndarray | None = None

    def __contains__(self, n: int) -> bool:
        return self.is_prime(n)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PrimeSieve):
            return NotImplemented
        return self.limit == other.limit and np.array_equal(self._bits, other._bits)

    def __repr__(self) -> str:
        return f"PrimeSieve(limit={self.limit})"

    def is_prime(self, n: int) -> bool:
        if n < 0 or n > self.limit:
            raise IndexError(f"{n} outside sieve range [0, {self.limit}]")
        return bool((self._bits[n >> 3] >> (n & 7)) & 1)

    def lookup(self, values: np.ndarray) -> np.ndarray:
        """Vectorized flag lookup; every value must lie in [0, limit]."""
        v = np.asarray(values, dtype=np.int64)
        return ((self._bits[v >> 3] >> (v & 7).astype(np.uint8)) & 1).astype(bool)

    def flags(self) -> np.ndarray:
        """Unpacked boolean table of length limit + 1."""
        return np.unpackbits(self._bits, count=self.limit + 1, bitorder="little").astype(bool)

    def primes(self, upto: int | None = None) -> np.ndarray:
        """Sorted int64 array of the primes <= min(upto, limit)."""
        if self._primes is None:
            primes = np.flatnonzero(self.flags()).astype(np.int64)
            primes.setflags(write=False)
            self._primes = primes
        if upto is None or upto >= self.limit:
            return self._primes
        return self._primes[: np.searchsorted(self._primes, upto, side="right")]

    def count(self, upto: int | None = None) -> int:
        hi = self.limit if upto is None else min(upto, self.limit)
        if hi < 2:
            return 0
        full, rem = divmod(hi + 1, 8)
        total = int(np.unpackbits(self._bits[:full]).sum())
        if rem:
            total += int(np.unpackbits(self._bits[full : full + 1], count=rem, bitorder="little").sum())
        return total


def _eratosthenes(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return flags


def sieve_primes(limit: int) -> PrimeSieve:
    return PrimeSieve(limit)


@lru_cache(maxsize=4)
def _cached_sieve(limit: int) -> PrimeSieve:
    return PrimeSieve(limit)


def shared_sieve(limit: int) -> PrimeSieve:
    """A process-wide sieve covering at least ``limit`` (rounded up to reuse)."""
    size = 1 << 16
    while size < limit:
        size <<= 1
    return _cached_sieve(max(size, limit))


def _miller_rabin(n: int) -> bool:
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        if a % n == 0:
            continue
        y = pow(a, d, n)
        if y == 1 or y == n - 1:
            continue
        for _ in range(r - 1):
            y = y * y % n
            if y == n - 1:
                break
        else:
            return False
    return True


def is_prime(n: int, sieve: PrimeSieve | None = None) -> bool:
    n = check_u64(n)
    if sieve is not None and n <= sieve.limit:
        return sieve.is_prime(n)
    if n < 2:
        return False
    for p in _TRIAL_PRIMES:
        if n % p == 0:
            return n == p
    if n < 53 * 53:
        return True
    return _miller_rabin(n)


def is_prime_many(values: np.ndarray, sieve: PrimeSieve | None = None) -> np.ndarray:
    """Elementwise :func:`is_prime` over an integer array."""
    values = np.asarray(values)
    out = np.zeros(values.shape, dtype=bool)
    if values.size == 0:
        return out
    if sieve is not None:
        covered = values <= sieve.limit
        if covered.all():
            return sieve.lookup(values)
        out[covered] = sieve.lookup(values[covered])
        rest = np.flatnonzero(~covered)
    else:
        rest = np.arange(values.size)
    flat = values.reshape(-1)
    res = out.reshape(-1)
    for i in rest:
        res[i] = is_prime(int(flat[i]))
    return out


def _integer_root(n: int, k: int) -> int:
    """Largest r with r**k <= n."""
    if k == 1:
        return n
    if k == 2:
        return math.isqrt(n)
    r = int(round(n ** (1.0 / k)))
    while r > 0 and r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def prime_power_base(n: int, sieve: PrimeSieve | None = None) -> tuple[int, int] | None:
    """Return (p, k) with n == p**k, k >= 1, or None.  1 is not a prime power."""
    n = check_u64(n)
    if n < 2:
        return None
    if n & 1 == 0:
        if n & (n - 1) == 0:
            return 2, n.bit_length() - 1
        return None
    for k in range(n.bit_length(), 0, -1):
        r = _integer_root(n, k)
        if r >= 2 and r**k == n and is_prime(r, sieve):
            return r, k
    return None


def is_prime_power(n: int, sieve: PrimeSieve | None = None) -> bool:
    return prime_power_base(n, sieve) is not None


def prime_power_flags(limit: int, sieve: PrimeSieve | None = None) -> np.ndarray:
    """Boolean table over [0, limit] marking p**k, k >= 1."""
    if sieve is None or sieve.limit < limit:
        sieve = PrimeSieve(max(limit, 1))
    flags = sieve.flags()[: limit + 1].copy()
    for p in sieve.primes(math.isqrt(limit)).tolist():
        q = p * p
        while q <= limit:
            flags[q] = True
            q *= p
    return flags


def prime_count(limit: int, sieve: PrimeSieve | None = None) -> int:
    """pi(limit) by sieving (or by reusing a sieve that already covers it)."""
    limit = check_u64(limit, "limit")
    if limit < 1:
        raise ValueError("limit must be >= 1")
    if sieve is None or sieve.limit < limit:
        sieve = PrimeSieve(limit)
    return sieve.count(limit)


def _pollard_brent(n: int) -> int:
    """Nontrivial factor of an odd composite n."""
    if n % 2 == 0:
        return 2
    for c in range(1, n):
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"failed to split {n}")


def factorize(n: int, sieve: PrimeSieve | None = None, trial_bound: int = 1000) -> list[tuple[int, int]]:
    """Prime factorization as increasing (prime, exponent) pairs.

    Trial division by primes up to ``trial_bound``; whatever cofactor remains
    is tested with :func:`is_prime` and split with Pollard-Brent if composite.
    """
    n = check_u64(n)
    if n < 1:
        raise ValueError("factorize requires n >= 1")
    out: dict[int, int] = {}
    for p in _small_primes(trial_bound):
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
    if n > 1:
        stack = [n]
        while stack:
            m = stack.pop()
            if is_prime(m, sieve):
                out[m] = out.get(m, 0) + 1
                continue
            r = math.isqrt(m)
            if r * r == m:
                stack += [r, r]
                continue
            d = _pollard_brent(m)
            stack += [d, m // d]
    return sorted(out.items())


@lru_cache(maxsize=8)
def _small_primes(bound: int) -> tuple[int, ...]:
    return tuple(PrimeSieve(max(bound, 2)).primes().tolist())


def smallest_factor_table(limit: int) -> np.ndarray:
    """spf[n] = least prime factor of n for 2 <= n <= limit (spf[0] = spf[1] = 0)."""
    spf = np.zeros(limit + 1, dtype=np.int64 if limit > 2**31 else np.int32)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            seg = spf[p * p :: p]
            seg[seg == 0] = p
    rest = np.flatnonzero(spf == 0)
    spf[rest] = rest
    spf[:2] = 0
    return spf


def factorize_with_table(n: int, spf: np.ndarray) -> list[tuple[int, int]]:
    """Factorization by repeated smallest-prime-factor lookup; n < len(spf)."""
    out: list[tuple[int, int]] = []
    while n > 1:
        p = int(spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out.append((p, e))
    return out


def mobius(n: int) -> int:
    n = check_u64(n)
    if n < 1:
        raise ValueError("mobius requires n >= 1")
    result = 1
    for _, e in factorize(n):
        if e > 1:
            return 0
        result = -result
    return result


def mobius_table(limit: int) -> np.ndarray:
    """mu(n) for 0 <= n <= limit (index 0 holds 0)."""
    mu = np.ones(limit + 1, dtype=np.int8)
    mu[0] = 0
    sieve = PrimeSieve(max(limit, 1))
    for p in sieve.primes().tolist():
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
    return mu


def primes_in(values: Iterable[int], sieve: PrimeSieve | None = None) -> list[int]:
    return [v for v in values if is_prime(v, sieve)]

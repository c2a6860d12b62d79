"""High-precision values of the densities P and D.

    P = sum over primes p of 1 / (p (p + 1))
    D = sum over prime powers m = p**k (k >= 1) of 1 / (m (m + 1))

Both are evaluated two ways: through the prime zeta function, using
1/(m(m+1)) = sum_{s>=2} (-1)**s m**-s and P(s) = sum_n mu(n) log zeta(ns) / n,
and by direct summation up to a prime limit, which brackets the true value
from below with a tail of at most 1/(limit + 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np

from .floorset import proper_prime_powers
from .primal import PrimeSieve, mobius

WORKING_DPS = 40
TERM_CUTOFF = mpmath.mpf("1e-18")
ZETA_TERMS = 100_000
# Relative accumulated rounding over at most ~1e5 additions at WORKING_DPS.
_ROUNDING = mpmath.mpf(10) ** (-(WORKING_DPS - 8))


@dataclass(frozen=True)
class ConstantEstimate:
    """A value with a rigorous bound on |value - true constant|.

    For ``direct_bracket`` estimates the truth lies in
    [value, value + error_bound].
    """

    name: str
    value: float
    error_bound: float
    method: str
    parameters: dict = field(default_factory=dict)

    @property
    def interval(self) -> tuple[float, float]:
        if self.method == "direct_bracket":
            return self.value, self.value + self.error_bound
        return self.value - self.error_bound, self.value + self.error_bound

    def contains(self, v: float) -> bool:
        lo, hi = self.interval
        return lo <= v <= hi


def _ctx():
    ctx = mpmath.mp.clone()
    ctx.dps = WORKING_DPS
    return ctx


@lru_cache(maxsize=None)
def _zeta_mp(s: int) -> tuple[mpmath.mpf, mpmath.mpf]:
    """(zeta(s) - 1, error bound), direct sum plus midpoint tail correction.

    f(t) = t**-s is convex, so the integral of f over [N + 1/2, inf) is an
    upper bound for sum_{n>N} f(n), and it overshoots by at most
    (f''(N + 1/2) - f'(N + 1/2)) / 24.
    """
    with mpmath.workdps(WORKING_DPS):
        s_mp = mpmath.mpf(s)
        # For large s few terms are needed: stop once the tail bound is tiny.
        n_terms = ZETA_TERMS
        for cand in (8, 64, 512, 4096, 32768):
            h = mpmath.mpf(cand) + mpmath.mpf(1) / 2
            if (s * (s + 1) * h ** (-s - 2) + s * h ** (-s - 1)) / 24 < mpmath.mpf(10) ** (-WORKING_DPS + 5):
                n_terms = cand
                break
        total = mpmath.fsum(mpmath.mpf(n) ** (-s_mp) for n in range(2, n_terms + 1))
        h = mpmath.mpf(n_terms) + mpmath.mpf(1) / 2
        tail = h ** (1 - s_mp) / (s_mp - 1)
        bound = (s * (s + 1) * h ** (-s - 2) + s * h ** (-s - 1)) / 24
        value = total + tail
        return value, bound + _ROUNDING * value


def zeta(s: int) -> float:
    """Riemann zeta at an integer s >= 2."""
    if s != int(s):
        raise ValueError("only integer arguments are supported")
    if s < 2:
        raise ValueError("zeta requires s >= 2")
    zm1, _ = _zeta_mp(int(s))
    return float(1 + zm1)


def zeta_with_bound(s: int) -> tuple[mpmath.mpf, mpmath.mpf]:
    if s < 2:
        raise ValueError("zeta requires s >= 2")
    zm1, err = _zeta_mp(int(s))
    return 1 + zm1, err


def _log_zeta(t: int) -> tuple[mpmath.mpf, mpmath.mpf]:
    """log zeta(t) as log1p(zeta(t) - 1), with propagated error."""
    zm1, err = _zeta_mp(t)
    with mpmath.workdps(WORKING_DPS):
        # d/dz log(1 + z) <= 1 for z >= 0
        return mpmath.log1p(zm1), err


@lru_cache(maxsize=None)
def _prime_zeta_mp(s: int) -> tuple[mpmath.mpf, mpmath.mpf]:
    """P(s) = sum_n mu(n) log zeta(ns) / n, truncated below TERM_CUTOFF.

    log zeta(t) <= zeta(t) - 1 <= 2**(1 - t) for t >= 2, so once
    2**(1 - ns) < cutoff the remaining terms sum to at most 2 * 2**(1 - ns).
    """
    with mpmath.workdps(WORKING_DPS):
        total = mpmath.mpf(0)
        err = mpmath.mpf(0)
        n = 1
        while True:
            t = n * s
            if mpmath.mpf(2) ** (1 - t) < TERM_CUTOFF:
                err += 2 * mpmath.mpf(2) ** (1 - t)
                break
            mu = mobius(n)
            if mu:
                lz, e = _log_zeta(t)
                total += mu * lz / n
                err += e / n
            n += 1
        return total, err


def prime_zeta(s: int) -> float:
    """Sum over primes of p**-s, for integer s >= 2."""
    if s != int(s):
        raise ValueError("only integer arguments are supported")
    if s < 2:
        raise ValueError("prime_zeta requires s >= 2")
    return float(_prime_zeta_mp(int(s))[0])


def prime_zeta_with_bound(s: int) -> tuple[float, float]:
    if s < 2:
        raise ValueError("prime_zeta requires s >= 2")
    v, e = _prime_zeta_mp(int(s))
    return float(v), float(e)


def _series_tail(depth: int) -> mpmath.mpf:
    # For s >= 3 both P(s) and sum over prime powers m**-s are <= 2**(1 - s).
    return mpmath.mpf(2) ** (1 - depth)


def constant_P_series(depth: int = 64) -> ConstantEstimate:
    if depth < 2:
        raise ValueError("depth must be >= 2")
    with mpmath.workdps(WORKING_DPS):
        total = mpmath.mpf(0)
        err = mpmath.mpf(0)
        for s in range(2, depth + 1):
            v, e = _prime_zeta_mp(s)
            total += v if s % 2 == 0 else -v
            err += e
        err += _series_tail(depth)
    return ConstantEstimate("P", float(total), float(err), "series", {"depth": depth})


def _prime_power_zeta_mp(s: int) -> tuple[mpmath.mpf, mpmath.mpf]:
    """Sum over prime powers m of m**-s, i.e. sum_{k>=1} P(ks)."""
    with mpmath.workdps(WORKING_DPS):
        total = mpmath.mpf(0)
        err = mpmath.mpf(0)
        k = 1
        while True:
            t = k * s
            if mpmath.mpf(2) ** (1 - t) < TERM_CUTOFF:
                err += 2 * mpmath.mpf(2) ** (1 - t)
                break
            v, e = _prime_zeta_mp(t)
            total += v
            err += e
            k += 1
        return total, err


def constant_D(depth: int = 64) -> ConstantEstimate:
    if depth < 2:
        raise ValueError("depth must be >= 2")
    with mpmath.workdps(WORKING_DPS):
        total = mpmath.mpf(0)
        err = mpmath.mpf(0)
        for s in range(2, depth + 1):
            v, e = _prime_power_zeta_mp(s)
            total += v if s % 2 == 0 else -v
            err += e
        err += _series_tail(depth)
    return ConstantEstimate("D", float(total), float(err), "series", {"depth": depth})


def _reciprocal_pair_sum(m: np.ndarray) -> float:
    m = m.astype(np.float64)
    return math.fsum((1.0 / m - 1.0 / (m + 1.0)).tolist())


def constant_P_direct(prime_limit: int) -> ConstantEstimate:
    """Partial sum over p <= prime_limit; the tail is below 1 / (prime_limit + 1)."""
    if prime_limit < 2:
        raise ValueError("prime_limit must be >= 2")
    primes = PrimeSieve(prime_limit).primes()
    return ConstantEstimate(
        "P",
        _reciprocal_pair_sum(primes),
        1.0 / (prime_limit + 1),
        "direct_bracket",
        {"prime_limit": prime_limit},
    )


def constant_D_direct(prime_limit: int) -> ConstantEstimate:
    """Partial sum over prime powers m <= prime_limit; same tail bound."""
    if prime_limit < 2:
        raise ValueError("prime_limit must be >= 2")
    primes = PrimeSieve(prime_limit).primes()
    powers = np.concatenate([primes, proper_prime_powers(prime_limit).astype(np.int64)])
    return ConstantEstimate(
        "D",
        _reciprocal_pair_sum(powers),
        1.0 / (prime_limit + 1),
        "direct_bracket",
        {"prime_limit": prime_limit},
    )


def prime_zeta_direct(s: int, prime_limit: int) -> tuple[float, float]:
    """(sum_{p <= limit} p**-s, tail bound (limit + 1/2)**(1-s) / (s - 1))."""
    primes = PrimeSieve(prime_limit).primes().astype(np.float64)
    partial = math.fsum((primes ** (-float(s))).tolist())
    tail = (prime_limit + 0.5) ** (1 - s) / (s - 1)
    return partial, tail


def euler_product_log_zeta(s: int, prime_limit: int) -> tuple[float, float]:
    """(sum_{p <= limit} -log(1 - p**-s), tail bound).

    For n > limit, -log(1 - n**-s) <= n**-s / (1 - n**-s) <= 2 n**-s, so the
    missing factors contribute at most 2 (limit + 1/2)**(1 - s) / (s - 1).
    """
    primes = PrimeSieve(prime_limit).primes().astype(np.float64)
    partial = math.fsum((-np.log1p(-(primes ** (-float(s))))).tolist())
    tail = 2 * (prime_limit + 0.5) ** (1 - s) / (s - 1)
    return partial, tail

"""Exact counts against their asymptotic main terms.

Rules for the normalized residual:

    gx   (G(x) - 4 sqrt(x) / log x) * (log x)**2 / sqrt(x)
    fx   (F(x) - P x) / sqrt(x)
    fpp  (F_pp(x) - D x) / sqrt(x)

P and D always come from :mod:`floorprimes.constants`.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from . import constants
from .floorset import F, F_primepower, G

log = logging.getLogger(__name__)

G_SOFT_BOUND = 10.0
F_SOFT_BOUND = 2.0

RULE_G = "residual*log(x)^2/sqrt(x)"
RULE_F = "residual/sqrt(x)"


@dataclass(frozen=True)
class AsymptoticSample:
    kind: str
    x: int
    exact: int
    main_term: float
    residual: float
    normalized: float
    rule: str

    def as_row(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Theorem5Constants:
    a1: float
    a2: float
    points: tuple[int, ...]


@lru_cache(maxsize=1)
def density_P() -> float:
    return constants.constant_P_series(64).value


@lru_cache(maxsize=1)
def density_D() -> float:
    return constants.constant_D(64).value


def _warn_if(sample: AsymptoticSample, bound: float) -> AsymptoticSample:
    if abs(sample.normalized) > bound:
        log.warning(
            "%s: |normalized residual| %.6g exceeds soft bound %g at x=%d (exact=%d, main=%.6f)",
            sample.kind, sample.normalized, bound, sample.x, sample.exact, sample.main_term,
        )
    return sample


def g_sample(x: int) -> AsymptoticSample:
    if x < 2:
        raise ValueError("gx samples need x >= 2")
    exact = G(x)
    lx = math.log(x)
    main = 4 * math.sqrt(x) / lx
    res = exact - main
    return AsymptoticSample("gx", x, exact, main, res, res * lx * lx / math.sqrt(x), RULE_G)


def _density_sample(kind: str, x: int, exact: int, density: float) -> AsymptoticSample:
    if x < 1:
        raise ValueError("x must be >= 1")
    main = density * x
    res = exact - main
    return AsymptoticSample(kind, x, exact, main, res, res / math.sqrt(x), RULE_F)


def f_sample(x: int) -> AsymptoticSample:
    return _density_sample("fx", x, F(x), density_P())


def fpp_sample(x: int) -> AsymptoticSample:
    return _density_sample("fpp", x, F_primepower(x), density_D())


def gx_report(points: Iterable[int]) -> list[AsymptoticSample]:
    return [_warn_if(g_sample(x), G_SOFT_BOUND) for x in points]


def fx_report(points: Iterable[int]) -> list[AsymptoticSample]:
    return [_warn_if(f_sample(x), F_SOFT_BOUND) for x in points]


def fx_primepower_report(points: Iterable[int]) -> list[AsymptoticSample]:
    return [_warn_if(fpp_sample(x), F_SOFT_BOUND) for x in points]


def theorem5_bounds(points: Sequence[int]) -> Theorem5Constants:
    """Smallest A1, A2 >= 0 consistent with every sampled F(x).

    Px - A1 sqrt(x)/log x <= F(x) <= Px + A2 sqrt(x)
    """
    points = list(points)
    if not points:
        raise ValueError("theorem5_bounds needs at least one point")
    if min(points) < 2:
        raise ValueError("theorem5_bounds needs x >= 2")
    a1 = a2 = 0.0
    P = density_P()
    for x in points:
        fx = F(x)
        rt = math.sqrt(x)
        a2 = max(a2, (fx - P * x) / rt)
        a1 = max(a1, (P * x - fx) * math.log(x) / rt)
    return Theorem5Constants(a1, a2, tuple(points))


def theorem5_violations(points: Iterable[int], bounds: Theorem5Constants) -> list[tuple[int, int, float, float]]:
    """(x, F(x), lower, upper) for each point falling outside the bounds."""
    P = density_P()
    out = []
    for x in points:
        fx = F(x)
        rt = math.sqrt(x)
        lower = P * x - bounds.a1 * rt / math.log(x)
        upper = P * x + bounds.a2 * rt
        if not lower <= fx <= upper:
            out.append((x, fx, lower, upper))
    return out


def geometric_grid(lo: int, hi: int, refine: bool = False) -> list[int]:
    """Powers of 10 in [lo, hi]; with ``refine`` also the floor(10**(k + 1/2)) midpoints."""
    if lo < 1 or hi < lo:
        raise ValueError("need 1 <= lo <= hi")
    out = []
    k = 0
    while 10**k <= hi:
        for x in ([10**k, math.isqrt(10 ** (2 * k + 1))] if refine else [10**k]):
            if lo <= x <= hi:
                out.append(x)
        k += 1
    return sorted(set(out))

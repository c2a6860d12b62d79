"""Primes in floor-function sets {x // n : 1 <= n <= x}."""
from .floorset import (
    F,
    G,
    F_bruteforce,
    F_primepower,
    F_primepower_bruteforce,
    FloorBlock,
    G_bruteforce,
    G_via_delta,
    distinct_values,
    iter_blocks,
    threshold_b,
)
from .primal import PrimeSieve, factorize, is_prime, is_prime_power, mobius, prime_count, sieve_primes

__version__ = "0.1.0"

__all__ = [
    "F",
    "G",
    "F_bruteforce",
    "F_primepower",
    "F_primepower_bruteforce",
    "FloorBlock",
    "G_bruteforce",
    "G_via_delta",
    "PrimeSieve",
    "distinct_values",
    "factorize",
    "is_prime",
    "is_prime_power",
    "iter_blocks",
    "mobius",
    "prime_count",
    "sieve_primes",
    "threshold_b",
]

"""Exact and compensated arithmetic shared by the rest of the package.

Exact rationals are plain :class:`fractions.Fraction` values (always kept in
lowest terms with a positive denominator).  Floating point sums go through
:func:`compensated_sum` or :class:`CompensatedAccumulator`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

ExactRatio = Fraction

EULER_GAMMA = 0.57721566490153286060651209008240243

HARMONIC_EXACT_LIMIT = 10_000
_U128 = 1 << 128


class ScaleLimitError(ValueError):
    """An argument is outside the range an algorithm is certified for."""


def gcd(a: int, b: int) -> int:
    if a < 1 or b < 1:
        raise ValueError(f"gcd expects positive integers, got ({a}, {b})")
    return math.gcd(a, b)


def lcm(a: int, b: int) -> int:
    """Least common multiple; the product ``a*b`` must fit in 128 bits."""
    if a < 1 or b < 1:
        raise ValueError(f"lcm expects positive integers, got ({a}, {b})")
    if a * b >= _U128:
        raise OverflowError(f"lcm({a}, {b}): product exceeds 128 bits")
    return a // math.gcd(a, b) * b


def isqrt(n: int) -> int:
    if n < 0:
        raise ValueError(f"isqrt of negative number {n}")
    return math.isqrt(n)


def euler_gamma() -> float:
    return EULER_GAMMA


@dataclass(frozen=True)
class MobiusTable:
    """Values of the Moebius function on ``1..limit``.

    ``values[k]`` holds mu(k); index 0 is unused and set to 0.
    """

    limit: int
    values: np.ndarray

    def __getitem__(self, k: int) -> int:
        if not 1 <= k <= self.limit:
            raise IndexError(f"mu({k}) outside table 1..{self.limit}")
        return int(self.values[k])

    def __len__(self) -> int:
        return self.limit


def mobius_sieve(limit: int) -> MobiusTable:
    if limit < 1:
        raise ValueError(f"mobius_sieve needs limit >= 1, got {limit}")
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    mu = np.ones(limit + 1, dtype=np.int8)
    mu[0] = 0
    for p in np.flatnonzero(is_prime):
        p = int(p)
        mu[p::p] *= -1
        if p * p <= limit:
            mu[p * p :: p * p] = 0
    mu.setflags(write=False)
    return MobiusTable(limit, mu)


class CompensatedAccumulator:
    """Running float sum with Neumaier compensation."""

    __slots__ = ("total", "compensation")

    def __init__(self, start: float = 0.0):
        self.total = float(start)
        self.compensation = 0.0

    def add(self, x: float) -> None:
        t = self.total + x
        if abs(self.total) >= abs(x):
            self.compensation += (self.total - t) + x
        else:
            self.compensation += (x - t) + self.total
        self.total = t

    @property
    def value(self) -> float:
        return self.total + self.compensation


def compensated_sum(terms) -> float:
    """Sum of floats, correctly rounded (Shewchuk partials via math.fsum)."""
    return math.fsum(terms)


@lru_cache(maxsize=64)
def lcm_upto(m: int) -> int:
    """lcm(1, 2, ..., m)."""
    result = 1
    for k in range(2, m + 1):
        result = result // math.gcd(result, k) * k
    return result


@lru_cache(maxsize=256)
def _harmonic_exact(m: int) -> Fraction:
    den = lcm_upto(m)
    return Fraction(sum(den // k for k in range(1, m + 1)), den)


_harmonic_cache = np.zeros(1)


def harmonic_table(m: int) -> np.ndarray:
    """Float array ``H`` with ``H[k]`` the k-th harmonic number for ``k <= m``.

    Entries come from one compensated left-to-right pass, so a given ``H[k]``
    is bit-identical however large the table is.
    """
    global _harmonic_cache
    if m < len(_harmonic_cache):
        return _harmonic_cache[: m + 1]
    size = max(m + 1, 2 * len(_harmonic_cache))
    table = np.empty(size)
    acc = CompensatedAccumulator()
    table[0] = 0.0
    for k in range(1, size):
        acc.add(1.0 / k)
        table[k] = acc.value
    table.setflags(write=False)
    _harmonic_cache = table
    return table[: m + 1]


def harmonic(m: int, mode: str = "float"):
    """Harmonic number H_m, as a Fraction (``mode="exact"``) or a float."""
    if m < 1:
        raise ValueError(f"harmonic needs m >= 1, got {m}")
    if mode == "exact":
        if m > HARMONIC_EXACT_LIMIT:
            raise ScaleLimitError(
                f"exact harmonic limited to m <= {HARMONIC_EXACT_LIMIT}, got {m}"
            )
        return _harmonic_exact(m)
    if mode != "float":
        raise ValueError(f"unknown harmonic mode {mode!r}")
    return float(harmonic_table(m)[m])

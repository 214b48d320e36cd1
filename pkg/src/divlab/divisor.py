"""Divisor summatory function, the Dirichlet remainder and fractional-part sums."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .numkernel import (
    EULER_GAMMA,
    ScaleLimitError,
    compensated_sum,
    isqrt,
    lcm_upto,
)

BRUTE_LIMIT = 10**6
HYPERBOLA_LIMIT = 10**14
FRAC_EXACT_ROOT_LIMIT = 10**4


def _check_positive(n: int) -> None:
    if n < 1:
        raise ValueError(f"expected a positive integer, got {n}")


def d_brute(n: int) -> int:
    """D(n) = sum of floor(n/x) over every x <= n."""
    _check_positive(n)
    if n > BRUTE_LIMIT:
        raise ScaleLimitError(f"d_brute limited to n <= {BRUTE_LIMIT}, got {n}")
    return int((n // np.arange(1, n + 1, dtype=np.int64)).sum())


def d_hyperbola(n: int) -> int:
    """D(n) in O(sqrt n) divisions: 2 * sum_{x <= s} floor(n/x) - s^2, s = isqrt(n)."""
    _check_positive(n)
    if n > HYPERBOLA_LIMIT:
        raise ScaleLimitError(f"d_hyperbola limited to n <= {HYPERBOLA_LIMIT}, got {n}")
    s = isqrt(n)
    # n <= 1e14 keeps every partial sum below 2**63
    half = int((n // np.arange(1, s + 1, dtype=np.int64)).sum())
    return 2 * half - s * s


def remainder_r(n: int) -> float:
    """Signed remainder D(n) - n ln n - (2 gamma - 1) n.

    Take ``abs()`` of the result for the usual (unsigned) R(n).
    """
    d = d_hyperbola(n)
    return d - n * math.log(n) - (2.0 * EULER_GAMMA - 1.0) * n


def frac_part_sum(n: int) -> Fraction:
    """Exact F(n) = sum_{x <= isqrt(n)} {n/x}, with {n/x} = (n mod x)/x."""
    _check_positive(n)
    s = isqrt(n)
    if s > FRAC_EXACT_ROOT_LIMIT:
        raise ScaleLimitError(
            f"exact frac_part_sum needs isqrt(n) <= {FRAC_EXACT_ROOT_LIMIT}, got {s}"
        )
    den = lcm_upto(s)
    return Fraction(sum((n % x) * (den // x) for x in range(1, s + 1)), den)


def centered_frac_sum(n: int) -> float:
    """S(n) = sum_{x <= isqrt(n)} ({n/x} - 1/2)."""
    _check_positive(n)
    s = isqrt(n)
    return compensated_sum([(n % x) / x - 0.5 for x in range(1, s + 1)])


@dataclass(frozen=True)
class RemainderSample:
    n: int
    d: int
    r: float
    s_centered: float
    f_raw: Fraction


def remainder_sample(n: int) -> RemainderSample:
    return RemainderSample(
        n=n,
        d=d_hyperbola(n),
        r=remainder_r(n),
        s_centered=centered_frac_sum(n),
        f_raw=frac_part_sum(n),
    )


def _sawtooth_terms(n: int, x: int, k_max: int) -> np.ndarray:
    k = np.arange(1, k_max + 1, dtype=np.int64)
    # reduce k*n mod x before scaling so the sine argument stays in [0, 2pi)
    phase = ((k * (n % x)) % x) / x
    return np.sin(2.0 * np.pi * phase) / k


def fourier_centered_frac(n: int, x: int, k_max: int) -> float:
    """Truncated sawtooth series -(1/pi) sum_{k <= k_max} sin(2 pi k n / x) / k.

    Converges to {n/x} - 1/2 when x does not divide n.  When x | n every term
    vanishes, so the value is 0 rather than the fractional-part value -1/2.
    """
    if x < 1 or k_max < 1:
        raise ValueError(f"need x >= 1 and k_max >= 1, got x={x}, k_max={k_max}")
    return -compensated_sum(_sawtooth_terms(n, x, k_max).tolist()) / math.pi


@dataclass(frozen=True)
class FourierRemainder:
    n: int
    k_max: int
    raw: float
    divisor_terms: int
    corrected: float


def fourier_remainder(n: int, k_max: int) -> FourierRemainder:
    """Sawtooth-series evaluation of S(n), summed over x <= isqrt(n).

    ``raw`` is the series as written.  Every x dividing n contributes 0 to it
    instead of -1/2; ``corrected`` adds those -1/2 terms back, and
    ``divisor_terms`` counts them.
    """
    _check_positive(n)
    s = isqrt(n)
    raw = compensated_sum(fourier_centered_frac(n, x, k_max) for x in range(1, s + 1))
    hits = sum(1 for x in range(1, s + 1) if n % x == 0)
    return FourierRemainder(n, k_max, raw, hits, raw - 0.5 * hits)

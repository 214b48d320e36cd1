"""Random fractional-part model: {n/x} is treated as a lattice-uniform w_x.

Covariances are exact rationals.  The closed form ``cov_analytic`` is checked
against ``cov_period_oracle``, which averages over one joint period of
``({n/a}, {n/b})``.

Sign convention: the covariance is ``(a,b)/(12[a,b]) - 1/(12ab)``.  The
variance at ``a == b`` must be ``(a^2-1)/(12a^2)``, which only the minus sign
gives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .numkernel import (
    ScaleLimitError,
    compensated_sum,
    harmonic,
    harmonic_table,
    isqrt,
    lcm,
    mobius_sieve,
)

PERIOD_ORACLE_LIMIT = 10**6
MU2_EXACT_ROOT_LIMIT = 2 * 10**4
TOTH_BRUTE_LIMIT = 2 * 10**3
TOTH_MOBIUS_LIMIT = 10**6
MU1W_DEFAULT_C = 1.0 / 12.0


@dataclass(frozen=True)
class LatticeUniform:
    """Uniform law on {0, 1/x, ..., (x-1)/x}."""

    x: int

    def __post_init__(self):
        if self.x < 1:
            raise ValueError(f"modulus must be positive, got {self.x}")

    @property
    def support(self) -> list[Fraction]:
        return [Fraction(k, self.x) for k in range(self.x)]

    @property
    def mean(self) -> Fraction:
        return Fraction(self.x - 1, 2 * self.x)

    @property
    def variance(self) -> Fraction:
        return Fraction(self.x * self.x - 1, 12 * self.x * self.x)


def cov_analytic(a: int, b: int) -> Fraction:
    """Cov(w_a, w_b) = (a,b) / (12 [a,b]) - 1 / (12 a b)."""
    if a < 1 or b < 1:
        raise ValueError(f"moduli must be positive, got ({a}, {b})")
    return Fraction(math.gcd(a, b), 12 * lcm(a, b)) - Fraction(1, 12 * a * b)


def cov_period_oracle(a: int, b: int) -> Fraction:
    """Exact covariance of ({n/a}, {n/b}) with n uniform over one period [a,b]."""
    if a < 1 or b < 1:
        raise ValueError(f"moduli must be positive, got ({a}, {b})")
    period = lcm(a, b)
    if period > PERIOD_ORACLE_LIMIT:
        raise ScaleLimitError(f"period lcm({a},{b}) = {period} exceeds {PERIOD_ORACLE_LIMIT}")
    # scaled by 2a and 2b: {n/a} - (a-1)/(2a) = (2(n mod a) - a + 1) / (2a)
    n = np.arange(1, period + 1, dtype=np.int64)
    u = 2 * (n % a) - (a - 1)
    v = 2 * (n % b) - (b - 1)
    total = int(np.dot(u, v))
    return Fraction(total, 4 * a * b * period)


@dataclass(frozen=True)
class CovarianceSpec:
    a: int
    b: int
    g: int
    l: int
    analytic: Fraction
    oracle: Fraction

    @classmethod
    def build(cls, a: int, b: int) -> "CovarianceSpec":
        return cls(a, b, math.gcd(a, b), lcm(a, b), cov_analytic(a, b), cov_period_oracle(a, b))


def mu1_r(n: int) -> float:
    """Model mean of S(n): -H_s / 2 with s = isqrt(n)."""
    return -0.5 * harmonic(isqrt(n))


def mu2_r_exact(n: int) -> float:
    """Sum of Cov(w_x, w_y) over all x, y <= isqrt(n), evaluated pair by pair."""
    s = isqrt(n)
    if s > MU2_EXACT_ROOT_LIMIT:
        raise ScaleLimitError(f"mu2_r_exact needs isqrt(n) <= {MU2_EXACT_ROOT_LIMIT}, got {s}")
    ys = np.arange(1, s + 1, dtype=np.int64)
    rows = []
    for x in range(1, s + 1):
        g = np.gcd(ys, x)
        # gcd/lcm = gcd^2 / (xy)
        row = (g * g - 1) / (12.0 * x * ys)
        rows.append(compensated_sum(row.tolist()))
    return compensated_sum(rows)


def mu2_asymptotic(n: int) -> float:
    """Leading term isqrt(n) / 4 of the model variance."""
    return isqrt(n) / 4.0


def _toth_brute(m: int) -> float:
    if m > TOTH_BRUTE_LIMIT:
        raise ScaleLimitError(f"brute Toth sum limited to m <= {TOTH_BRUTE_LIMIT}, got {m}")
    bs = np.arange(1, m + 1, dtype=np.int64)
    rows = []
    for a in range(1, m + 1):
        g = np.gcd(bs, a)
        rows.append(compensated_sum((g * g / (a * bs)).tolist()))
    return compensated_sum(rows)


def _toth_mobius(m: int) -> float:
    # Write a = g a', b = g b' with g = gcd(a, b).  Then gcd/lcm = 1/(a' b') and
    #   T(m) = sum_g  sum_{a', b' <= m/g, coprime} 1/(a' b').
    # Sieving coprimality with sum_{d | (a',b')} mu(d) gives, for M = m // g,
    #   sum_{coprime a', b' <= M} 1/(a' b') = sum_{d <= M} mu(d)/d^2 * H_{M // d}^2.
    if m > TOTH_MOBIUS_LIMIT:
        raise ScaleLimitError(f"Moebius Toth sum limited to m <= {TOTH_MOBIUS_LIMIT}, got {m}")
    mu = mobius_sieve(m).values.astype(np.float64)
    h = harmonic_table(m)
    parts = []
    for g in range(1, m + 1):
        big = m // g
        d = np.arange(1, big + 1, dtype=np.int64)
        hd = h[big // d]
        parts.extend((mu[1 : big + 1] / (d * d) * hd * hd).tolist())
    return compensated_sum(parts)


def toth_sum(m: int, method: str = "mobius") -> float:
    """T(m) = sum_{a, b <= m} gcd(a, b) / lcm(a, b)."""
    if m < 1:
        raise ValueError(f"toth_sum needs m >= 1, got {m}")
    if method == "brute":
        return _toth_brute(m)
    if method == "mobius":
        return _toth_mobius(m)
    raise ValueError(f"unknown method {method!r}")


def mu1_w(n: int, c: float = MU1W_DEFAULT_C) -> float:
    """Model expectation (2n+1) H_s - s^2 - s + c of W(n), s = isqrt(n)."""
    if n < 1:
        raise ValueError(f"mu1_w needs n >= 1, got {n}")
    s = isqrt(n)
    return (2 * n + 1) * harmonic(s) - s * s - s + c


@dataclass(frozen=True)
class MomentSummary:
    s: int
    mu1_r: float
    mu2_r_exact: float
    mu2_r_asym: float
    toth: float


def moment_summary(n: int) -> MomentSummary:
    s = isqrt(n)
    return MomentSummary(
        s=s,
        mu1_r=mu1_r(n),
        mu2_r_exact=mu2_r_exact(n),
        mu2_r_asym=mu2_asymptotic(n),
        toth=toth_sum(s),
    )


def independent_variance(n: int) -> float:
    """Variance of sum_{x <= isqrt(n)} w_x when the w_x are drawn independently."""
    s = isqrt(n)
    return float(sum(LatticeUniform(x).variance for x in range(1, s + 1)))


@dataclass(frozen=True)
class RngSeed:
    seed: int
    stream: int = 0

    def __post_init__(self):
        for v in (self.seed, self.stream):
            if not 0 <= v < 1 << 64:
                raise ValueError(f"seed and stream must be unsigned 64-bit, got {v}")

    def generator(self, n: int) -> np.random.Generator:
        """PCG64 stream keyed by (seed, stream, n)."""
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream, n))
        return np.random.Generator(np.random.PCG64(ss))


def _centered_draws(draws: np.ndarray, x: np.ndarray) -> np.ndarray:
    # w_x - (x-1)/(2x) with w_x = k/x  ->  (2k - x + 1) / (2x)
    return (2 * draws - x + 1) / (2.0 * x)


def sample_w_deviation(n: int, seed: RngSeed) -> float:
    """One draw of sum_{x <= isqrt(n)} (w_x - E w_x) with independent w_x."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    x = np.arange(1, isqrt(n) + 1, dtype=np.int64)
    draws = seed.generator(n).integers(0, x)
    return compensated_sum(_centered_draws(draws, x).tolist())


def sample_w_deviations(n: int, seed: RngSeed, size: int) -> np.ndarray:
    """``size`` independent draws from a single (seed, stream, n) generator."""
    x = np.arange(1, isqrt(n) + 1, dtype=np.int64)
    draws = seed.generator(n).integers(0, x, size=(size, len(x)))
    return _centered_draws(draws, x).sum(axis=1)

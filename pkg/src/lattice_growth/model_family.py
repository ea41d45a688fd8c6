"""The binomial model family f(n) = C(n + alpha*k, k) and Vandermonde estimates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .exact_arith import (
    DEFAULT_PRECISION,
    DyadicInterval,
    Number,
    binom_general,
    e_bounds,
)

Ratio = Union[Fraction, DyadicInterval]

# above this k the ratios are only formed as interval products
EXACT_K_LIMIT = 500


@dataclass(frozen=True)
class ModelParams:
    k: int
    alpha: Fraction

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        if self.k < 1:
            raise ValueError("k must be positive")
        if not 0 <= self.alpha <= 1:
            raise ValueError("alpha must lie in [0, 1]")

    @property
    def shift(self) -> Fraction:
        return self.alpha * self.k


@dataclass(frozen=True)
class RatioPair:
    """logconv = g(2n)^2 / (g(n) g(4n)),  decay = g(2n) / g(4n)."""

    logconv: Ratio
    decay: Ratio


def f_model(p: ModelParams, n: Number) -> Fraction:
    return binom_general(Fraction(n) + p.shift, p.k)


def ratios(g_n: Number, g_2n: Number, g_4n: Number) -> RatioPair:
    g_n, g_2n, g_4n = Fraction(g_n), Fraction(g_2n), Fraction(g_4n)
    if min(g_n, g_2n, g_4n) <= 0:
        raise ValueError("ratios need strictly positive values")
    return RatioPair(g_2n * g_2n / (g_n * g_4n), g_2n / g_4n)


def factors_positive(p: ModelParams, n: int) -> bool:
    """True when every factor n + alpha*k - j (j < k) is positive."""
    return n + p.shift - (p.k - 1) > 0


def model_ratios_interval(p: ModelParams, n: int, precision: int = DEFAULT_PRECISION) -> RatioPair:
    """Enclose both ratios by multiplying the k per-factor ratios with outward rounding.

        decay   = prod_j (2n + ak - j) / (4n + ak - j)
        logconv = prod_j (2n + ak - j)^2 / ((n + ak - j)(4n + ak - j))
    """
    if n < 1:
        raise ValueError("n must be positive")
    if not factors_positive(p, n):
        raise ValueError(f"n={n} leaves a nonpositive factor for k={p.k}, alpha={p.alpha}")
    s = p.shift
    one = DyadicInterval.from_fraction(1, precision)
    logconv = decay = one
    for j in range(p.k):
        a = n + s - j
        b = 2 * n + s - j
        c = 4 * n + s - j
        decay = decay * DyadicInterval.from_fraction(b / c, precision)
        logconv = logconv * DyadicInterval.from_fraction(b * b / (a * c), precision)
    return RatioPair(logconv, decay)


def model_ratios(p: ModelParams, n: int, precision: int = DEFAULT_PRECISION) -> RatioPair:
    """Exact ratios for moderate k, interval products beyond EXACT_K_LIMIT."""
    if p.k > EXACT_K_LIMIT:
        return model_ratios_interval(p, n, precision)
    return ratios(f_model(p, n), f_model(p, 2 * n), f_model(p, 4 * n))


# ---------------------------------------------------------------------------
# Vandermonde convolution and its head / tail
# ---------------------------------------------------------------------------


def _terms(a: Number, b: Number, k: int, lo: int, hi: int) -> Fraction:
    return sum((binom_general(a, k - j) * binom_general(b, j) for j in range(lo, hi + 1)), Fraction(0))


def vandermonde_sum(a: Number, b: Number, k: int) -> Fraction:
    """sum_{j=0}^k C(a, k-j) C(b, j)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return _terms(a, b, k, 0, k)


def head_sum(a: Number, b: Number, k: int, jmax: int) -> Fraction:
    if k < 0:
        raise ValueError("k must be nonnegative")
    return _terms(a, b, k, 0, min(jmax, k))


def tail_sum(a: Number, b: Number, k: int, jmin: int) -> Fraction:
    if k < 0:
        raise ValueError("k must be nonnegative")
    return _terms(a, b, k, max(jmin, 0), k)


def tail_threshold(a: Number, b: Number, k: int, precision: int = 64) -> int:
    """Smallest integer j with j > 6 e k b / a, decided with certified bounds on e.

    j > 6ekb/a  <=>  e < j a / (6 k b); since e is irrational the comparison
    is never an equality, so refining the enclosure of e always terminates.
    """
    a, b = Fraction(a), Fraction(b)
    if a <= 0 or b < 0:
        raise ValueError("need a > 0 and b >= 0")
    if k == 0 or b == 0:
        return 0
    p = precision
    while True:
        e = e_bounds(p)
        e_lo, e_hi = e.lo_fraction(), e.hi_fraction()
        # candidate from the upper bound is always safe: j > 6 e_hi k b / a => j > 6ekb/a
        j_safe = math.floor(6 * e_hi * k * b / a) + 1
        j_low = math.floor(6 * e_lo * k * b / a) + 1
        if j_safe == j_low:
            return j_safe
        if j_safe - j_low > 1:
            p *= 2
            continue
        # the only undecided candidate is j_low; ask whether e < j_low a / (6 k b)
        r = Fraction(j_low) * a / (6 * k * b)
        if r > e_hi:
            return j_low
        if r < e_lo:
            return j_safe
        p *= 2


def pair_factor(n: int, x: Number) -> Fraction:
    """F(x) = 1 + n x / ((n - x)(4n - x)) for |x| < n."""
    x = Fraction(x)
    if abs(x) >= n:
        raise ValueError(f"|x| must be below n={n}, got {x}")
    return 1 + n * x / ((n - x) * (4 * n - x))


def model_forward_difference(p: ModelParams, order: int, n: Number) -> Fraction:
    """order-th forward difference of m -> f(m) at n, by the alternating sum."""
    n = Fraction(n)
    return sum(
        ((-1) ** (order - i) * math.comb(order, i) * f_model(p, n + i) for i in range(order + 1)),
        Fraction(0),
    )

"""Exact n-step distribution of the simple random walk on Z^2.

Distributions hold integer path counts on a dense ``(2n+1) x (2n+1)`` grid
of Python integers; probabilities are ``count / 4**n`` and are formed only
when an expectation is taken.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Callable, Iterator

import numpy as np

from .harmonic_lattice import scaled_Z_abs2

__all__ = [
    "WalkDistribution",
    "McEstimate",
    "walk_distribution",
    "walk_distributions",
    "expect",
    "expect_int",
    "coordinate_moment",
    "monte_carlo_Q",
    "symmetric_sum",
]


@dataclass(frozen=True, eq=False)
class WalkDistribution:
    n: int
    grid: np.ndarray  # object array, grid[x + n, y + n] = number of paths ending at (x, y)

    def count(self, x: int, y: int) -> int:
        n = self.n
        if abs(x) > n or abs(y) > n:
            return 0
        return int(self.grid[x + n, y + n])

    def support(self) -> Iterator[tuple[int, int, int]]:
        """Yield (x, y, count) for reachable points in row-major order."""
        n = self.n
        g = self.grid
        for x in range(-n, n + 1):
            w = n - abs(x)
            row = g[x + n]
            # parity: x + y = n (mod 2)
            for y in range(-w, w + 1, 2):
                yield x, y, int(row[y + n])

    @property
    def counts(self) -> dict[tuple[int, int], int]:
        return {(x, y): c for x, y, c in self.support()}

    def total(self) -> int:
        return sum(c for _, _, c in self.support())

    def __eq__(self, other) -> bool:
        return isinstance(other, WalkDistribution) and self.n == other.n and self.counts == other.counts

    def __hash__(self):
        return hash(self.n)


def _step(grid: np.ndarray) -> np.ndarray:
    m = grid.shape[0]
    new = np.zeros((m + 2, m + 2), dtype=object)
    new[2:, 1:-1] += grid
    new[:-2, 1:-1] += grid
    new[1:-1, 2:] += grid
    new[1:-1, :-2] += grid
    return new


def walk_distributions(n: int) -> Iterator[WalkDistribution]:
    """Yield the distributions after 0, 1, ..., n steps."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    grid = np.ones((1, 1), dtype=object)
    yield WalkDistribution(0, grid)
    for m in range(1, n + 1):
        grid = _step(grid)
        yield WalkDistribution(m, grid)


# distributions up to this many steps are memoized (they feed every Newton
# coefficient); larger ones are rebuilt from the largest memoized one
_MEMO_LIMIT = 96
_memo: dict[int, WalkDistribution] = {}


def walk_distribution(n: int) -> WalkDistribution:
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n in _memo:
        return _memo[n]
    start = max((m for m in _memo if m <= n), default=None)
    if start is None:
        d = next(walk_distributions(0))
        _memo[0] = d
    else:
        d = _memo[start]
    while d.n < n:
        d = WalkDistribution(d.n + 1, _step(d.grid))
        if d.n <= _MEMO_LIMIT:
            _memo.setdefault(d.n, d)
    return d


def expect(d: WalkDistribution, f: Callable[[int, int], Fraction | int]) -> Fraction:
    """E f(S_n) = sum_v counts(v) f(v) / 4**n, exactly."""
    acc = Fraction(0)
    for x, y, c in d.support():
        acc += c * f(x, y)
    return acc / 4**d.n


def expect_int(d: WalkDistribution, f: Callable[[int, int], int]) -> Fraction:
    """Like :func:`expect` for integer-valued ``f``; sums integers only."""
    return Fraction(sum(c * f(x, y) for x, y, c in d.support()), 4**d.n)


def symmetric_sum(d: WalkDistribution, f: Callable[[int, int], int]) -> int:
    """sum_v counts(v) f(v) for f invariant under the 8 lattice symmetries.

    Visits only the wedge 0 <= y <= x and weights each point by its orbit size.
    """
    n = d.n
    g = d.grid
    total = 0
    for x in range(0, n + 1):
        row = g[x + n]
        top = min(x, n - x)
        start = (n - x) % 2
        for y in range(start, top + 1, 2):
            c = row[y + n]
            if x == 0:
                mult = 1
            elif y == 0 or y == x:
                mult = 4
            else:
                mult = 8
            total += mult * c * f(x, y)
    return int(total)


def coordinate_moment(d: WalkDistribution, two_k: int) -> Fraction:
    """E x(S_n)**two_k."""
    if two_k < 0 or two_k % 2:
        raise ValueError("moment order must be an even nonnegative integer")
    n = d.n
    total = 0
    for x in range(-n, n + 1):
        total += int(sum(d.grid[x + n])) * x**two_k
    return Fraction(total, 4**n)


# ---------------------------------------------------------------------------
# Monte Carlo cross-check
# ---------------------------------------------------------------------------

_STEP_VECTORS = np.array([(0, 1), (0, -1), (1, 0), (-1, 0)], dtype=np.int64)


@dataclass(frozen=True)
class McEstimate:
    mean: str
    standard_error: str
    samples: int
    seed: int

    def as_dict(self) -> dict:
        return {"mean": self.mean, "standard_error": self.standard_error, "samples": self.samples, "seed": self.seed}


def sample_endpoints(n: int, samples: int, seed: int) -> np.ndarray:
    """Endpoints of ``samples`` independent n-step walks (Philox stream keyed by ``seed``)."""
    rng = np.random.Generator(np.random.Philox(seed))
    if n == 0:
        return np.zeros((samples, 2), dtype=np.int64)
    steps = rng.integers(0, 4, size=(samples, n))
    return _STEP_VECTORS[steps].sum(axis=1)


def monte_carlo_Q(
    k: int, n: int, samples: int, seed: int, variant: str = "plain", digits: int = 40
) -> McEstimate:
    """Sample mean of |Z_k(S_n)|**2 (or |Z_tilde_k(S_n)|**2) with its standard error.

    Each sample is evaluated exactly; mean and standard deviation are formed
    in exact rationals and rendered with ``digits`` significant decimals.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    if variant not in ("plain", "tilde"):
        raise ValueError(f"unknown variant {variant!r}")
    ends = sample_endpoints(n, samples, seed)
    pts, freq = np.unique(ends, axis=0, return_counts=True)
    if variant == "plain":
        scale = 4**k * math.factorial(k) ** 2
        vals = [Fraction(scaled_Z_abs2(k, 2 * int(x), 2 * int(y)), scale) for x, y in pts]
    else:
        scale = math.factorial(k) ** 2
        vals = [Fraction(scaled_Z_abs2(k, int(x), int(y)), scale) for x, y in pts]
    freq = [int(f) for f in freq]
    mean = sum((f * v for f, v in zip(freq, vals)), Fraction(0)) / samples
    if samples > 1:
        ss = sum((f * (v - mean) ** 2 for f, v in zip(freq, vals)), Fraction(0))
        var = ss / (samples - 1)
    else:
        var = Fraction(0)
    with localcontext() as ctx:
        ctx.prec = digits
        mean_dec = Decimal(mean.numerator) / Decimal(mean.denominator)
        se_dec = (Decimal(var.numerator) / Decimal(var.denominator) / samples).sqrt()
    return McEstimate(str(mean_dec), str(se_dec), samples, seed)

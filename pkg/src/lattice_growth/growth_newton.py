"""Exact growth functionals Q_k, Q~_k and their Newton coefficients.

``Q_k(n) = E|Z_k(S_n)|**2`` is expanded as ``sum_j a[k,j] * C(n, k-j)``.
Two independent routes produce the coefficients:

* differences: a[k,j] is the (k-j)-th forward difference of Q_k at 0;
* recursion: a[k,j] = 4**-j * Q~_j(k-j), one walk distribution per j.

The recursion is the production path and feeds a persistent
:class:`CoeffCache`; the difference route is kept as its oracle.
"""

from __future__ import annotations

import logging
import math
import os
import tempfile
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Sequence

from .harmonic_lattice import HalfPoint, abs2, laplacian_power, scaled_Z_abs2, Z
from .random_walk import symmetric_sum, walk_distribution

log = logging.getLogger(__name__)

# Rational stand-ins for the existential constants of the coefficient bound
# and the truncated expansion: A1 >= 20 e^2, B1 >= 8 c1/c0, A >= 6 e A1,
# B >= 1 + B1/2.
A1 = 148
B1 = 9
TRUNC_A = 2414
TRUNC_B = Fraction(11, 2)

CACHE_ENV = "LATTICE_GROWTH_CACHE"
CACHE_VERSION = 1
DEFAULT_CACHE_DIR = ".lattice_growth_cache"


@dataclass(frozen=True)
class NewtonSeries:
    """Coefficients (a[k,0], ..., a[k,k]) of Q_k against C(n, k-j)."""

    k: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.k + 1:
            raise ValueError(f"expected {self.k + 1} coefficients, got {len(self.coeffs)}")

    def __getitem__(self, j: int) -> Fraction:
        return self.coeffs[j]


# ---------------------------------------------------------------------------
# direct evaluation
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def q_direct(k: int, n: int, variant: str = "plain") -> Fraction:
    """E|Z_k(S_n)|**2 (plain) or E|Z~_k(S_n)|**2 (tilde), exactly."""
    if k < 0 or n < 0:
        raise ValueError("k and n must be nonnegative")
    d = walk_distribution(n)
    if variant == "plain":
        total = symmetric_sum(d, lambda x, y: scaled_Z_abs2(k, 2 * x, 2 * y))
        return Fraction(total, 4**n * 4**k * math.factorial(k) ** 2)
    if variant == "tilde":
        total = symmetric_sum(d, lambda x, y: scaled_Z_abs2(k, x, y))
        return Fraction(total, 4**n * math.factorial(k) ** 2)
    raise ValueError(f"unknown variant {variant!r}")


def q_tilde(j: int, m: int) -> Fraction:
    return q_direct(j, m, "tilde")


# ---------------------------------------------------------------------------
# Newton coefficients
# ---------------------------------------------------------------------------


def forward_differences(values: Sequence) -> list[list]:
    """Difference triangle: row m holds f^(m)(0), ..., f^(m)(N-m)."""
    if not values:
        raise ValueError("need at least one value")
    rows = [list(values)]
    while len(rows[-1]) > 1:
        prev = rows[-1]
        rows.append([b - a for a, b in zip(prev, prev[1:])])
    return rows


def coeffs_by_difference(k: int) -> NewtonSeries:
    if k < 0:
        raise ValueError("k must be nonnegative")
    rows = forward_differences([q_direct(k, n) for n in range(k + 1)])
    return NewtonSeries(k, tuple(Fraction(rows[k - j][0]) for j in range(k + 1)))


class CoeffCache:
    """Persistent store (k, j) -> a[k,j].

    The file is CSV: a ``#lattice-growth-coeffs v1`` header, then rows
    ``k,j,numerator,denominator``.  Saving rewrites the file atomically;
    entries are never changed once written.
    """

    HEADER = f"#lattice-growth-coeffs v{CACHE_VERSION}"

    def __init__(self, path: str | os.PathLike | None = None):
        self.path = Path(path) if path is not None else None
        self._data: dict[tuple[int, int], Fraction] = {}
        self._dirty = False
        self._lock = threading.Lock()
        if self.path is not None and self.path.exists():
            self._load()

    @classmethod
    def default(cls, path: str | os.PathLike | None = None) -> "CoeffCache":
        """--cache flag > $LATTICE_GROWTH_CACHE > ./.lattice_growth_cache/coeffs.csv."""
        if path is None:
            path = os.environ.get(CACHE_ENV) or Path(DEFAULT_CACHE_DIR) / "coeffs.csv"
        return cls(path)

    def _load(self) -> None:
        with open(self.path, encoding="ascii") as fh:
            header = fh.readline().strip()
            if header != self.HEADER:
                raise ValueError(f"{self.path}: unsupported cache header {header!r}")
            for lineno, line in enumerate(fh, start=2):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                try:
                    k, j, num, den = line.split(",")
                    self._data[(int(k), int(j))] = Fraction(int(num), int(den))
                except ValueError as exc:
                    raise ValueError(f"{self.path}:{lineno}: malformed cache record") from exc

    def get(self, k: int, j: int) -> Fraction | None:
        return self._data.get((k, j))

    def put(self, k: int, j: int, value: Fraction) -> None:
        with self._lock:
            old = self._data.get((k, j))
            if old is not None:
                if old != value:
                    raise ValueError(f"cache conflict at ({k}, {j}): {old} != {value}")
                return
            self._data[(k, j)] = Fraction(value)
            self._dirty = True

    def __len__(self) -> int:
        return len(self._data)

    def __contains__(self, key) -> bool:
        return key in self._data

    def save(self) -> None:
        if self.path is None or not self._dirty:
            return
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=self.path.parent, prefix=".coeffs-", suffix=".tmp")
            with os.fdopen(fd, "w", encoding="ascii") as fh:
                fh.write(self.HEADER + "\n")
                for (k, j), v in sorted(self._data.items()):
                    fh.write(f"{k},{j},{v.numerator},{v.denominator}\n")
            os.replace(tmp, self.path)
            self._dirty = False


def coeffs_by_recursion(k: int, cache: CoeffCache | None = None) -> NewtonSeries:
    """a[k,j] = 4**-j Q~_j(k - j)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    out = []
    for j in range(k + 1):
        v = cache.get(k, j) if cache is not None else None
        if v is None:
            v = q_tilde(j, k - j) / 4**j
            if cache is not None:
                cache.put(k, j, v)
        out.append(v)
    return NewtonSeries(k, tuple(out))


def coefficients(k: int, cache: CoeffCache | None = None) -> NewtonSeries:
    return coeffs_by_recursion(k, cache)


# ---------------------------------------------------------------------------
# Newton evaluation
# ---------------------------------------------------------------------------


def q_truncated(series: NewtonSeries, n: int, jmax: int) -> Fraction:
    """sum_{j <= jmax} a[k,j] C(n, k-j)."""
    k = series.k
    if n < 0:
        raise ValueError("n must be nonnegative")
    if not 0 <= jmax <= k:
        raise ValueError(f"jmax must lie in [0, {k}], got {jmax}")
    total = Fraction(0)
    for j in range(jmax + 1):
        c = math.comb(n, k - j)
        if c:
            total += series.coeffs[j] * c
    return total


def q_newton(series: NewtonSeries, n: int) -> Fraction:
    return q_truncated(series, n, series.k)


def lower_cutoff(k: int, n: int) -> int:
    """min(k, ceil(5 k^2 / n))."""
    return min(k, -((-5 * k * k) // n))


def upper_cutoff(k: int, n: int, A: int | Fraction = TRUNC_A) -> int:
    """min(k, ceil(A k^2 / n))."""
    return min(k, math.ceil(Fraction(A) * k * k / n))


# ---------------------------------------------------------------------------
# forward derivatives
# ---------------------------------------------------------------------------


def _difference_at(values: Sequence[Fraction]) -> Fraction:
    m = len(values) - 1
    return sum(((-1) ** (m - i) * math.comb(m, i) * v for i, v in enumerate(values)), Fraction(0))


def q_forward_derivative(k: int, m: int, n: int, method: str = "table") -> Fraction:
    """Q_k^(m)(n), the m-th forward difference of Q_k at n.

    ``table`` differences direct values of Q_k; ``laplacian`` averages
    Delta**m |Z_k|**2 over the n-step walk.
    """
    if m < 0 or n < 0:
        raise ValueError("m and n must be nonnegative")
    if method == "table":
        return _difference_at([q_direct(k, n + i) for i in range(m + 1)])
    if method == "laplacian":
        g = lru_cache(maxsize=None)(abs2(Z(k)))
        d = walk_distribution(n)
        total = Fraction(0)
        for x, y, c in d.support():
            total += c * laplacian_power(g, m, HalfPoint(2 * x, 2 * y))
        return total / 4**n
    raise ValueError(f"unknown method {method!r}")

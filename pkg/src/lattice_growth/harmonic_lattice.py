"""Harmonic discretizations of z**k/k! and difference operators on the lattice.

Points of the half-integer lattice are stored with doubled coordinates
(:class:`HalfPoint`), so every evaluation stays in exact integer/rational
arithmetic.  ``Z(k)`` is the discrete analogue of ``z**k / k!`` built from
the polynomials ``F_k(x) = binom(x + (k-1)/2, k)``; it is harmonic for the
four-neighbour Laplacian.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Callable, NamedTuple, Sequence, Union

from .exact_arith import Number, binom_general

__all__ = [
    "HalfPoint",
    "GaussianRational",
    "Direction",
    "STEPS",
    "LatticeFunction",
    "eval_F",
    "eval_Z",
    "eval_Z_tilde",
    "Z",
    "Z_tilde",
    "abs2",
    "partial",
    "laplacian",
    "iterated_partial",
    "laplacian_power",
    "scaled_Z",
    "scaled_Z_abs2",
]


class HalfPoint(NamedTuple):
    """The point (x2/2, y2/2) of the half-integer lattice."""

    x2: int
    y2: int

    @classmethod
    def of(cls, x: Number, y: Number) -> "HalfPoint":
        fx, fy = Fraction(x) * 2, Fraction(y) * 2
        if fx.denominator != 1 or fy.denominator != 1:
            raise ValueError(f"({x}, {y}) is not a half-integer point")
        return cls(int(fx), int(fy))

    @property
    def x(self) -> Fraction:
        return Fraction(self.x2, 2)

    @property
    def y(self) -> Fraction:
        return Fraction(self.y2, 2)

    def is_integer(self) -> bool:
        return self.x2 % 2 == 0 and self.y2 % 2 == 0

    def shift(self, s: "Direction", halves: int = 2) -> "HalfPoint":
        """Move by ``halves / 2`` copies of ``s`` (default: one full step)."""
        dx, dy = s.value
        return HalfPoint(self.x2 + halves * dx, self.y2 + halves * dy)

    def offset(self, dx2: int, dy2: int) -> "HalfPoint":
        return HalfPoint(self.x2 + dx2, self.y2 + dy2)


ORIGIN = HalfPoint(0, 0)


@dataclass(frozen=True)
class GaussianRational:
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @staticmethod
    def _lift(other) -> "GaussianRational":
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussianRational(other, 0)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return GaussianRational(
            self.re * other.re - self.im * other.im, self.re * other.im + self.im * other.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return GaussianRational(self.re / other, self.im / other)
        return NotImplemented

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    @property
    def abs2(self) -> Fraction:
        """Squared modulus, exact."""
        return self.re * self.re + self.im * self.im

    def __str__(self) -> str:
        from .exact_arith import format_rational

        if self.im == 0:
            return format_rational(self.re)
        sign = "-" if self.im < 0 else "+"
        return f"{format_rational(self.re)} {sign} {format_rational(abs(self.im))}i"


I_POWERS = (
    GaussianRational(1, 0),
    GaussianRational(0, 1),
    GaussianRational(-1, 0),
    GaussianRational(0, -1),
)


class Direction(enum.Enum):
    """The four unit steps of the square lattice."""

    UP = (0, 1)
    DOWN = (0, -1)
    RIGHT = (1, 0)
    LEFT = (-1, 0)

    def __neg__(self) -> "Direction":
        dx, dy = self.value
        return Direction((-dx, -dy))

    @property
    def unit(self) -> "GaussianRational":
        """The step as a complex number: 1, i, -1 or -i."""
        dx, dy = self.value
        return GaussianRational(dx, dy)

    @classmethod
    def parse(cls, text: str) -> "Direction":
        aliases = {"+y": cls.UP, "-y": cls.DOWN, "+x": cls.RIGHT, "-x": cls.LEFT}
        if text in aliases:
            return aliases[text]
        return cls[text.upper()]


STEPS = tuple(Direction)

Value = Union[Fraction, GaussianRational]
LatticeFunction = Callable[[HalfPoint], Value]


# ---------------------------------------------------------------------------
# reference evaluation (explicit products)
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def eval_F(k: int, x: Number) -> Fraction:
    """F_k(x) = binom(x + (k-1)/2, k)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return binom_general(Fraction(x) + Fraction(k - 1, 2), k)


def eval_Z(k: int, p: HalfPoint) -> GaussianRational:
    """Z_k(x, y) = sum_l i**l F_{k-l}(x) F_l(y)."""
    x, y = p.x, p.y
    re = im = Fraction(0)
    for l in range(k + 1):
        term = eval_F(k - l, x) * eval_F(l, y)
        r = l % 4
        if r == 0:
            re += term
        elif r == 1:
            im += term
        elif r == 2:
            re -= term
        else:
            im -= term
    return GaussianRational(re, im)


def eval_Z_tilde(k: int, p: HalfPoint | tuple[int, int]) -> GaussianRational:
    """2**k Z_k(x/2, y/2) at an integer point (x, y)."""
    if isinstance(p, HalfPoint):
        if not p.is_integer():
            raise ValueError(f"Z_tilde is defined on integer points only, got {p}")
        x, y = p.x2 // 2, p.y2 // 2
    else:
        x, y = p
    # (x/2, y/2) has doubled coordinates (x, y)
    return eval_Z(k, HalfPoint(x, y)) * (2**k)


def Z(k: int) -> LatticeFunction:
    return lambda p: eval_Z(k, p)


def Z_tilde(k: int) -> LatticeFunction:
    return lambda p: eval_Z_tilde(k, p)


def abs2(u: LatticeFunction) -> LatticeFunction:
    def f(p: HalfPoint) -> Fraction:
        v = u(p)
        return v.abs2 if isinstance(v, GaussianRational) else v * v

    return f


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------


def partial(u: LatticeFunction, s: Direction, p: HalfPoint) -> Value:
    return u(p.shift(s)) - u(p)


def laplacian(u: LatticeFunction, p: HalfPoint) -> Value:
    center = u(p)
    total = sum((u(p.shift(s)) for s in STEPS), Fraction(0)) - 4 * center
    return total / 4


def iterated_partial(u: LatticeFunction, dirs: Sequence[Direction], p: HalfPoint) -> Value:
    """d_{s_1} ... d_{s_l} u at p, expanded over the 2**l corner shifts."""
    total: Value = Fraction(0)
    l = len(dirs)
    for mask in product((0, 1), repeat=l):
        dx2 = dy2 = 0
        for bit, s in zip(mask, dirs):
            if bit:
                dx2 += 2 * s.value[0]
                dy2 += 2 * s.value[1]
        sign = -1 if (l - sum(mask)) % 2 else 1
        total = total + sign * u(p.offset(dx2, dy2))
    return total


def laplacian_power(u: LatticeFunction, l: int, p: HalfPoint) -> Value:
    """Delta**l u at p by l nested passes over a shrinking diamond stencil."""
    if l < 0:
        raise ValueError("l must be nonnegative")
    values = {
        (dx, dy): u(p.offset(2 * dx, 2 * dy))
        for dx in range(-l, l + 1)
        for dy in range(-(l - abs(dx)), l - abs(dx) + 1)
    }
    for r in range(l - 1, -1, -1):
        nxt = {}
        for dx in range(-r, r + 1):
            w = r - abs(dx)
            for dy in range(-w, w + 1):
                c = values[(dx, dy)]
                nb = values[(dx + 1, dy)] + values[(dx - 1, dy)] + values[(dx, dy + 1)] + values[(dx, dy - 1)]
                nxt[(dx, dy)] = (nb - 4 * c) / 4
        values = nxt
    return values[(0, 0)]


# ---------------------------------------------------------------------------
# fast integer kernel
# ---------------------------------------------------------------------------
# 2**l l! F_l(t/2) = prod_{i<l} (t + l - 1 - 2i) =: P_l(t), an integer for
# integer t.  Hence 2**k k! Z_k(x2/2, y2/2) = sum_l i**l C(k,l) P_{k-l}(x2) P_l(y2)
# is a Gaussian integer, and Z_tilde_k(x, y) = that sum at (x, y) divided by k!.


@lru_cache(maxsize=None)
def _P(l: int, t: int) -> int:
    r = 1
    for i in range(l):
        r *= t + l - 1 - 2 * i
    return r


def scaled_Z(k: int, x2: int, y2: int) -> tuple[int, int]:
    """(re, im) of 2**k k! Z_k(x2/2, y2/2) as exact integers."""
    re = im = 0
    for l in range(k + 1):
        v = math.comb(k, l) * _P(k - l, x2) * _P(l, y2)
        r = l & 3
        if r == 0:
            re += v
        elif r == 1:
            im += v
        elif r == 2:
            re -= v
        else:
            im -= v
    return re, im


def scaled_Z_abs2(k: int, x2: int, y2: int) -> int:
    re, im = scaled_Z(k, x2, y2)
    return re * re + im * im

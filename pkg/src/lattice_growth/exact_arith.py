"""Exact rationals, generalized binomials and outward-rounded dyadic intervals.

Rationals are :class:`fractions.Fraction` (always reduced, positive
denominator).  Irrational quantities such as square roots, ``2**-t`` and
``n**e`` are enclosed in :class:`DyadicInterval` values whose endpoints are
``mantissa * 2**exponent`` with directed rounding, so an enclosure always
contains the true real number.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple, Union

Rational = Fraction
Number = Union[int, Fraction]

DEFAULT_PRECISION = 128
MAX_PRECISION = 4096

# n! bracketed by c0 (n/e)^n sqrt(n) and c1 (n/e)^n sqrt(n) for n >= 1.
STIRLING_C0 = Fraction(5, 2)
STIRLING_C1 = Fraction(11, 4)

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"``.  Decimal notation is rejected on purpose."""
    m = _RATIONAL_RE.match(text)
    if not m:
        raise ValueError(f"not a rational of the form p/q: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator: {text!r}")
    return Fraction(num, den)


def format_rational(q: Number) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def binom_general(r: Number, k: int) -> Fraction:
    """prod_{i<k} (r - i) / k!  for rational r."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    r = Fraction(r)
    p, q = r.numerator, r.denominator
    num = 1
    for i in range(k):
        num *= p - i * q
    return Fraction(num, q**k * math.factorial(k))


# ---------------------------------------------------------------------------
# dyadic numbers
# ---------------------------------------------------------------------------


class Dyadic(NamedTuple):
    """The exact number ``man * 2**exp``."""

    man: int
    exp: int

    def to_fraction(self) -> Fraction:
        if self.exp >= 0:
            return Fraction(self.man << self.exp)
        return Fraction(self.man, 1 << -self.exp)

    def magnitude(self) -> int:
        """floor(log2|x|) + 1, or a very small number for zero."""
        if self.man == 0:
            return -(1 << 62)
        return abs(self.man).bit_length() + self.exp

    def __str__(self) -> str:
        return f"{self.man}*2^{self.exp}"


ZERO = Dyadic(0, 0)


def _normalize(man: int, exp: int) -> Dyadic:
    if man == 0:
        return ZERO
    tz = (man & -man).bit_length() - 1
    return Dyadic(man >> tz, exp + tz)


def _round(man: int, exp: int, prec: int, up: bool) -> Dyadic:
    extra = abs(man).bit_length() - prec
    if extra <= 0:
        return _normalize(man, exp)
    q = man >> extra
    if up and (q << extra) != man:
        q += 1
    return _normalize(q, exp + extra)


def round_dyadic(d: Dyadic, prec: int, up: bool) -> Dyadic:
    return _round(d.man, d.exp, prec, up)


def dyadic_from_fraction(q: Number, prec: int, up: bool) -> Dyadic:
    q = Fraction(q)
    a, b = q.numerator, q.denominator
    if a == 0:
        return ZERO
    if b & (b - 1) == 0:
        return _round(a, -(b.bit_length() - 1), prec, up)
    shift = prec + 2 - (abs(a).bit_length() - b.bit_length())
    if shift >= 0:
        num, den = a << shift, b
    else:
        num, den = a, b << -shift
    man = num // den if not up else -((-num) // den)
    return _round(man, -shift, prec, up)


def dyadic_cmp(a: Dyadic, b: Dyadic) -> int:
    """Exact three-way comparison, cheap even for very distant exponents."""
    sa = (a.man > 0) - (a.man < 0)
    sb = (b.man > 0) - (b.man < 0)
    if sa != sb:
        return -1 if sa < sb else 1
    if sa == 0:
        return 0
    ma, mb = a.magnitude(), b.magnitude()
    if ma != mb:
        bigger = 1 if ma > mb else -1
        return bigger * sa
    e = min(a.exp, b.exp)
    x = a.man << (a.exp - e)
    y = b.man << (b.exp - e)
    return (x > y) - (x < y)


def dyadic_add(a: Dyadic, b: Dyadic) -> Dyadic:
    if a.man == 0:
        return b
    if b.man == 0:
        return a
    e = min(a.exp, b.exp)
    return _normalize((a.man << (a.exp - e)) + (b.man << (b.exp - e)), e)


def _div_round(a: Dyadic, b: Dyadic, prec: int, up: bool) -> Dyadic:
    q = dyadic_from_fraction(Fraction(a.man, b.man), prec, up)
    return Dyadic(q.man, q.exp + a.exp - b.exp)


def _sqrt_round(a: Dyadic, prec: int, up: bool) -> Dyadic:
    if a.man < 0:
        raise ValueError("square root of a negative number")
    if a.man == 0:
        return ZERO
    man, exp = a.man, a.exp
    shift = max(0, 2 * (prec + 2) - man.bit_length() + 2)
    if (exp - shift) % 2:
        shift += 1
    man <<= shift
    exp -= shift
    r = math.isqrt(man)
    if up and r * r != man:
        r += 1
    return _normalize(r, exp // 2)


# ---------------------------------------------------------------------------
# intervals
# ---------------------------------------------------------------------------


class Verdict(enum.Enum):
    LESS = "LESS"
    NOT_LESS = "NOT_LESS"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class DyadicInterval:
    """Closed interval [lo, hi] with dyadic endpoints."""

    lo: Dyadic
    hi: Dyadic
    precision: int = DEFAULT_PRECISION

    def __post_init__(self):
        if dyadic_cmp(self.lo, self.hi) > 0:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    # construction ---------------------------------------------------------

    @classmethod
    def from_fraction(cls, q: Number, precision: int = DEFAULT_PRECISION) -> "DyadicInterval":
        return cls(
            dyadic_from_fraction(q, precision, up=False),
            dyadic_from_fraction(q, precision, up=True),
            precision,
        )

    @classmethod
    def point(cls, d: Dyadic, precision: int = DEFAULT_PRECISION) -> "DyadicInterval":
        d = _normalize(*d)
        return cls(d, d, precision)

    @classmethod
    def pow2(cls, e: int, precision: int = DEFAULT_PRECISION) -> "DyadicInterval":
        return cls.point(Dyadic(1, e), precision)

    def _coerce(self, other) -> "DyadicInterval":
        if isinstance(other, DyadicInterval):
            return other
        if isinstance(other, (int, Fraction)):
            return DyadicInterval.from_fraction(other, self.precision)
        return NotImplemented

    @property
    def prec(self) -> int:
        return self.precision

    # accessors ------------------------------------------------------------

    def lo_fraction(self) -> Fraction:
        return self.lo.to_fraction()

    def hi_fraction(self) -> Fraction:
        return self.hi.to_fraction()

    def width(self) -> Fraction:
        return self.hi_fraction() - self.lo_fraction()

    def _replace_precision(self, precision: int) -> "DyadicInterval":
        return DyadicInterval(self.lo, self.hi, precision)

    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, x: Union[Number, "DyadicInterval"]) -> bool:
        if isinstance(x, DyadicInterval):
            return dyadic_cmp(self.lo, x.lo) <= 0 and dyadic_cmp(x.hi, self.hi) <= 0
        x = Fraction(x)
        return self.lo_fraction() <= x <= self.hi_fraction()

    def __str__(self) -> str:
        return f"[{to_scientific(self.lo)}, {to_scientific(self.hi)}]"

    # arithmetic -----------------------------------------------------------

    def _with(self, other: "DyadicInterval", lo: Dyadic, hi: Dyadic) -> "DyadicInterval":
        return DyadicInterval(lo, hi, max(self.precision, other.precision))

    def __neg__(self) -> "DyadicInterval":
        return DyadicInterval(Dyadic(-self.hi.man, self.hi.exp), Dyadic(-self.lo.man, self.lo.exp), self.precision)

    def __add__(self, other) -> "DyadicInterval":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = max(self.precision, other.precision)
        lo = round_dyadic(dyadic_add(self.lo, other.lo), p, up=False)
        hi = round_dyadic(dyadic_add(self.hi, other.hi), p, up=True)
        return self._with(other, lo, hi)

    __radd__ = __add__

    def __sub__(self, other) -> "DyadicInterval":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "DyadicInterval":
        return (-self) + other

    def __mul__(self, other) -> "DyadicInterval":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = max(self.precision, other.precision)
        products = [
            Dyadic(a.man * b.man, a.exp + b.exp)
            for a in (self.lo, self.hi)
            for b in (other.lo, other.hi)
        ]
        lo = min(products, key=_cmp_key)
        hi = max(products, key=_cmp_key)
        return self._with(other, round_dyadic(lo, p, False), round_dyadic(hi, p, True))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "DyadicInterval":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.lo.man <= 0 <= other.hi.man:
            raise ZeroDivisionError("interval divisor contains zero")
        p = max(self.precision, other.precision)
        los, his = [], []
        for a in (self.lo, self.hi):
            for b in (other.lo, other.hi):
                los.append(_div_round(a, b, p, up=False))
                his.append(_div_round(a, b, p, up=True))
        return self._with(other, min(los, key=_cmp_key), max(his, key=_cmp_key))

    def __rtruediv__(self, other) -> "DyadicInterval":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def scale2(self, e: int) -> "DyadicInterval":
        """Exact multiplication by 2**e."""
        return DyadicInterval(
            Dyadic(self.lo.man, self.lo.exp + e), Dyadic(self.hi.man, self.hi.exp + e), self.precision
        )

    def sqrt(self) -> "DyadicInterval":
        if self.lo.man < 0:
            raise ValueError("square root of an interval reaching below zero")
        return DyadicInterval(
            _sqrt_round(self.lo, self.precision, up=False),
            _sqrt_round(self.hi, self.precision, up=True),
            self.precision,
        )


class _cmp_key:
    __slots__ = ("d",)

    def __init__(self, d: Dyadic):
        self.d = d

    def __lt__(self, other: "_cmp_key") -> bool:
        return dyadic_cmp(self.d, other.d) < 0


def as_interval(x: Union[Number, DyadicInterval], precision: int = DEFAULT_PRECISION) -> DyadicInterval:
    if isinstance(x, DyadicInterval):
        return x
    return DyadicInterval.from_fraction(x, precision)


def to_scientific(d: Dyadic, digits: int = 12) -> str:
    """Decimal rendering of a dyadic, truncated toward zero (display only)."""
    if d.man == 0:
        return "0"
    sign = "-" if d.man < 0 else ""
    man = abs(d.man)
    if d.exp >= 0 and (man.bit_length() + d.exp) < 200:
        return sign + str(man << d.exp)
    est = math.floor((man.bit_length() + d.exp - 1) * math.log10(2))
    # choose scale so that the integer part has about `digits` digits
    scale = digits - 1 - est
    if scale >= 0:
        num = man * 10**scale
        val = num >> -d.exp if d.exp < 0 else num << d.exp
    else:
        num = man << d.exp if d.exp >= 0 else man
        den = 10**-scale << (-d.exp if d.exp < 0 else 0)
        val = num // den
    s = str(val)
    exp10 = len(s) - 1 - scale
    mant = s[0] + ("." + s[1:digits] if len(s) > 1 else "")
    return f"{sign}{mant}e{exp10:+d}"


def certified_compare(a: Union[Number, DyadicInterval], b: Union[Number, DyadicInterval]) -> Verdict:
    """LESS only if every point of ``a`` is below every point of ``b``."""
    a = as_interval(a)
    b = as_interval(b)
    if dyadic_cmp(a.hi, b.lo) < 0:
        return Verdict.LESS
    if dyadic_cmp(a.lo, b.hi) >= 0:
        return Verdict.NOT_LESS
    return Verdict.INCONCLUSIVE


def escalate(
    attempt: Callable[[int], Verdict],
    precision: int = DEFAULT_PRECISION,
    max_precision: int = MAX_PRECISION,
) -> tuple[Verdict, int]:
    """Rerun ``attempt`` with doubled precision while it is inconclusive."""
    p = precision
    while True:
        verdict = attempt(p)
        if verdict is not Verdict.INCONCLUSIVE or p >= max_precision:
            return verdict, p
        p = min(2 * p, max_precision)


# ---------------------------------------------------------------------------
# transcendental enclosures (fixed point with directed rounding)
# ---------------------------------------------------------------------------


def _fix_floor(q: Fraction, w: int) -> int:
    return (q.numerator << w) // q.denominator


def _fix_ceil(q: Fraction, w: int) -> int:
    return -((-q.numerator << w) // q.denominator)


def _exp_small(z: Fraction, w: int) -> tuple[int, int]:
    # bounds on exp(z) * 2**w for 0 <= z <= 1/2
    zl, zh = _fix_floor(z, w), _fix_ceil(z, w)
    tl = th = sl = sh = 1 << w
    i = 1
    while th > 1:
        tl = (tl * zl) // (i << w)
        th = -((-th * zh) // (i << w))
        sl += tl
        sh += th
        i += 1
    # geometric tail with ratio <= 1/2 after the last term
    return sl, sh + th + 1


def _atanh_small(t: Fraction, w: int) -> tuple[int, int]:
    # bounds on atanh(t) * 2**w for 0 <= t <= 1/3
    t2 = t * t
    pl, ph = _fix_floor(t, w), _fix_ceil(t, w)
    t2l, t2h = _fix_floor(t2, w), _fix_ceil(t2, w)
    sl = sh = 0
    i = 0
    while ph > 1:
        sl += pl // (2 * i + 1)
        sh += -((-ph) // (2 * i + 1))
        pl = (pl * t2l) >> w
        ph = -((-ph * t2h) >> w)
        i += 1
    # remaining terms sum to at most ph / (1 - t^2) <= 9/8 ulp
    return sl, sh + 2


def _ln2_fixed(w: int) -> tuple[int, int]:
    lo, hi = _atanh_small(Fraction(1, 3), w)
    return 2 * lo, 2 * hi


def ln_bounds(q: Number, precision: int = DEFAULT_PRECISION) -> DyadicInterval:
    """Enclosure of the natural logarithm of a positive rational."""
    q = Fraction(q)
    if q <= 0:
        raise ValueError("logarithm of a nonpositive number")
    if q == 1:
        return DyadicInterval.point(ZERO, precision)
    e = q.numerator.bit_length() - q.denominator.bit_length()
    m = q / Fraction(2) ** e
    if m < 1:
        e -= 1
        m *= 2
    w = precision + abs(e).bit_length() + 16
    l2l, l2h = _ln2_fixed(w)
    ml, mh = _atanh_small((m - 1) / (m + 1), w)
    ml, mh = 2 * ml, 2 * mh
    if e >= 0:
        lo, hi = e * l2l + ml, e * l2h + mh
    else:
        lo, hi = e * l2h + ml, e * l2l + mh
    return DyadicInterval(_round(lo, -w, precision, False), _round(hi, -w, precision, True), precision)


def _exp_nonneg(y: Fraction, precision: int) -> tuple[Dyadic, Dyadic]:
    t = math.ceil(2 * y)
    s = (t - 1).bit_length() if t > 1 else 0
    w = precision + s + 16
    lo, hi = _exp_small(y / (1 << s), w)
    dlo, dhi = Dyadic(lo, -w), Dyadic(hi, -w)
    for _ in range(s):
        dlo = _round(dlo.man * dlo.man, 2 * dlo.exp, w, False)
        dhi = _round(dhi.man * dhi.man, 2 * dhi.exp, w, True)
    return round_dyadic(dlo, precision, False), round_dyadic(dhi, precision, True)


def exp_bounds(y: Number, precision: int = DEFAULT_PRECISION) -> DyadicInterval:
    """Enclosure of exp(y) for rational y."""
    y = Fraction(y)
    if y == 0:
        return DyadicInterval.point(Dyadic(1, 0), precision)
    if y > 0:
        lo, hi = _exp_nonneg(y, precision)
        return DyadicInterval(lo, hi, precision)
    lo, hi = _exp_nonneg(-y, precision + 4)
    one = Dyadic(1, 0)
    return DyadicInterval(_div_round(one, hi, precision, False), _div_round(one, lo, precision, True), precision)


def exp_interval(y: DyadicInterval) -> DyadicInterval:
    """exp is increasing, so endpoints map to endpoints."""
    p = y.precision
    return DyadicInterval(exp_bounds(y.lo_fraction(), p).lo, exp_bounds(y.hi_fraction(), p).hi, p)


def e_bounds(precision: int = DEFAULT_PRECISION) -> DyadicInterval:
    """Enclosure of Euler's number."""
    return exp_bounds(1, precision)


def sqrt_bounds(q: Number, precision: int = DEFAULT_PRECISION) -> DyadicInterval:
    """Enclosure of sqrt(q) with relative width at most 2**-precision."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("square root of a negative number")
    a, b = q.numerator, q.denominator
    ra, rb = math.isqrt(a), math.isqrt(b)
    if ra * ra == a and rb * rb == b:
        return DyadicInterval.from_fraction(Fraction(ra, rb), precision + 2)._replace_precision(precision)
    inner = DyadicInterval.from_fraction(q, 2 * precision + 8)
    return DyadicInterval(
        _sqrt_round(inner.lo, precision + 2, False), _sqrt_round(inner.hi, precision + 2, True), precision
    )


def _pow2_neg_point(x: Fraction, precision: int, up: bool) -> Dyadic:
    m = math.floor(x)
    f = x - m
    if f == 0:
        return Dyadic(1, -m)
    p = precision + 8
    w = p + 16
    l2l, l2h = _ln2_fixed(w)
    # f*ln2 enclosed, then exp(-f ln 2) = 1/exp(f ln 2)
    if up:
        y = f * Fraction(l2l, 1 << w)
        lo, _ = _exp_nonneg(y, p)
        r = _div_round(Dyadic(1, 0), lo, precision, True)
    else:
        y = f * Fraction(l2h, 1 << w)
        _, hi = _exp_nonneg(y, p)
        r = _div_round(Dyadic(1, 0), hi, precision, False)
    return Dyadic(r.man, r.exp - m)


def pow2_neg_bounds(t: Union[Number, DyadicInterval], precision: int = DEFAULT_PRECISION) -> DyadicInterval:
    """Enclosure of {2**-x : x in t} for t >= 0."""
    t = as_interval(t, precision)
    if t.lo.man < 0:
        raise ValueError("exponent interval must be nonnegative")
    lo = _pow2_neg_point(t.hi_fraction(), precision, up=False)
    hi = _pow2_neg_point(t.lo_fraction(), precision, up=True)
    return DyadicInterval(lo, hi, precision)


def _exact_root(n: int, q: int) -> int | None:
    r = round(n ** (1.0 / q)) if n < 2**1000 else None
    if r is None:
        return None
    for c in (r - 1, r, r + 1):
        if c >= 0 and c**q == n:
            return c
    return None


def real_power_bounds(n: int, e: Number, precision: int = DEFAULT_PRECISION) -> DyadicInterval:
    """Enclosure of n**e for integer n >= 1 and rational e >= 0, via exp(e ln n)."""
    e = Fraction(e)
    if n < 1:
        raise ValueError("base must be a positive integer")
    if e < 0:
        raise ValueError("exponent must be nonnegative")
    if n == 1 or e == 0:
        return DyadicInterval.point(Dyadic(1, 0), precision)
    root = _exact_root(n, e.denominator)
    if root is not None:
        return DyadicInterval.from_fraction(Fraction(root) ** e.numerator, precision)
    ln = ln_bounds(n, precision + 8)
    return DyadicInterval(
        exp_bounds(e * ln.lo_fraction(), precision).lo,
        exp_bounds(e * ln.hi_fraction(), precision).hi,
        precision,
    )

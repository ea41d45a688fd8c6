"""The named checks.

Each check walks its parameter grid, compares both sides of one inequality or
identity per grid cell and keeps the smallest slack.  Rational comparisons
are exact; comparisons involving square roots, powers of two or e use
outward-rounded intervals through :func:`certify_le`.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from functools import lru_cache
from itertools import product

from ..exact_arith import (
    DEFAULT_PRECISION,
    MAX_PRECISION,
    DyadicInterval,
    binom_general,
    dyadic_cmp,
    e_bounds,
    format_rational,
    pow2_neg_bounds,
    real_power_bounds,
    sqrt_bounds,
)
from ..growth_newton import (
    A1,
    B1,
    TRUNC_A,
    TRUNC_B,
    coeffs_by_difference,
    coeffs_by_recursion,
    forward_differences,
    lower_cutoff,
    q_direct,
    q_forward_derivative,
    q_newton,
    q_tilde,
    q_truncated,
    upper_cutoff,
)
from ..harmonic_lattice import (
    ORIGIN,
    STEPS,
    HalfPoint,
    abs2,
    eval_F,
    eval_Z,
    eval_Z_tilde,
    iterated_partial,
    laplacian,
    laplacian_power,
    partial,
)
from ..model_family import (
    EXACT_K_LIMIT,
    ModelParams,
    f_model,
    factors_positive,
    head_sum,
    model_ratios,
    model_ratios_interval,
    pair_factor,
    tail_sum,
    tail_threshold,
)
from ..random_walk import coordinate_moment, monte_carlo_Q, walk_distribution
from .registry import CheckError, Outcome, Param, register
from .report import CheckVerdict, certify_le, combine

WITNESS_LIMIT = 20


class Tally:
    """Smallest slack over exact instances; negative slack is a violation.

    With ``strict`` a zero slack also counts as a violation.
    """

    def __init__(self, strict: bool = False):
        self.strict = strict
        self.margin: Fraction | None = None
        self.worst: dict | None = None
        self.violations: list[dict] = []
        self.count = 0

    def add(self, slack, **where) -> None:
        slack = Fraction(slack)
        self.count += 1
        if self.margin is None or slack < self.margin:
            self.margin, self.worst = slack, dict(where, slack=slack)
        bad = slack <= 0 if self.strict else slack < 0
        if bad and len(self.violations) < WITNESS_LIMIT:
            self.violations.append(dict(where, slack=slack))

    def outcome(self, **extra) -> Outcome:
        details = dict(extra.pop("details", {}), instances=self.count)
        if self.violations:
            return Outcome(CheckVerdict.FAIL, self.margin, self.violations, details=details, **extra)
        witnesses = [self.worst] if self.worst is not None else []
        return Outcome(CheckVerdict.PASS, self.margin, witnesses, details=details, **extra)


class IntervalTally:
    """Like :class:`Tally` for certified interval comparisons."""

    def __init__(self):
        self.margin: DyadicInterval | None = None
        self.worst: dict | None = None
        self.flagged: list[dict] = []
        self.verdicts: list[CheckVerdict] = []
        self.max_precision_used = 0

    def add(self, verdict: CheckVerdict, margin: DyadicInterval, precision: int, **where) -> None:
        self.verdicts.append(verdict)
        self.max_precision_used = max(self.max_precision_used, precision)
        if self.margin is None or dyadic_cmp(margin.lo, self.margin.lo) < 0:
            self.margin, self.worst = margin, dict(where, margin=margin)
        if verdict is not CheckVerdict.PASS and len(self.flagged) < WITNESS_LIMIT:
            self.flagged.append(dict(where, margin=margin, verdict=verdict))

    def outcome(self, **extra) -> Outcome:
        details = dict(extra.pop("details", {}), instances=len(self.verdicts),
                       max_precision_used=self.max_precision_used)
        verdict = combine(self.verdicts)
        witnesses = self.flagged if verdict is not CheckVerdict.PASS else ([self.worst] if self.worst else [])
        return Outcome(verdict, self.margin, witnesses, details=details, **extra)


def _half_grid(radius: int):
    r2 = 2 * radius
    for x2 in range(-r2, r2 + 1):
        for y2 in range(-r2, r2 + 1):
            yield HalfPoint(x2, y2)


@lru_cache(maxsize=64)
def _Z_cached(k: int):
    return lru_cache(maxsize=None)(lambda p: eval_Z(k, p))


# ---------------------------------------------------------------------------
# lattice identities
# ---------------------------------------------------------------------------


@register(
    "harmonicity",
    "Delta Z_k = 0 on the half-integer lattice",
    k_min=Param(0, lo=0, hi=40),
    k_max=Param(10, lo=0, hi=40, quick=8),
    radius=Param(10, lo=0, hi=40, quick=8),
)
def harmonicity(k_min, k_max, radius):
    t = Tally()
    for k in range(k_min, k_max + 1):
        u = _Z_cached(k)
        for p in _half_grid(radius):
            t.add(-laplacian(u, p).abs2, k=k, x=p.x, y=p.y)
    return t.outcome()


@register(
    "shift_identity",
    "d_s Z_k(p) = s Z_{k-1}(p + s/2), s read as a unit complex number",
    k_min=Param(1, lo=1, hi=40),
    k_max=Param(10, lo=1, hi=40),
    radius=Param(5, lo=0, hi=40),
)
def shift_identity(k_min, k_max, radius):
    t = Tally()
    for k in range(k_min, k_max + 1):
        u, v = _Z_cached(k), _Z_cached(k - 1)
        for p in _half_grid(radius):
            for s in STEPS:
                d, w = partial(u, s, p), v(p.shift(s, halves=1))
                # the unit factor drops out of the moduli, which is what the coefficient formula uses
                t.add(-(d - s.unit * w).abs2 - abs(d.abs2 - w.abs2), k=k, x=p.x, y=p.y, s=s.name)
    return t.outcome()


@register(
    "laplace_power_identity",
    "Delta^l |Z_k|^2 (0) = 4^-l sum over step tuples of |d_s1..d_sl Z_k|^2 (0)",
    k_min=Param(0, lo=0, hi=16),
    k_max=Param(8, lo=0, hi=16),
    l_max=Param(4, lo=0, hi=6),
)
def laplace_power_identity(k_min, k_max, l_max):
    t = Tally()
    for k in range(k_min, k_max + 1):
        u = _Z_cached(k)
        g = lru_cache(maxsize=None)(abs2(u))
        for l in range(l_max + 1):
            lhs = laplacian_power(g, l, ORIGIN)
            rhs = sum((iterated_partial(u, s, ORIGIN).abs2 for s in product(STEPS, repeat=l)), Fraction(0))
            rhs /= 4**l
            t.add(-abs(lhs - rhs), k=k, l=l)
    return t.outcome()


@register(
    "derivative_laplacian",
    "Q_k^(m)(n) by difference table equals E Delta^m |Z_k|^2 (S_n)",
    k_max=Param(6, lo=0, hi=12),
    m_max=Param(4, lo=0, hi=8),
    n_max=Param(8, lo=0, hi=24),
)
def derivative_laplacian(k_max, m_max, n_max):
    t = Tally()
    for k, m, n in product(range(k_max + 1), range(m_max + 1), range(n_max + 1)):
        a = q_forward_derivative(k, m, n, "table")
        b = q_forward_derivative(k, m, n, "laplacian")
        t.add(-abs(a - b), k=k, m=m, n=n)
    # the n = 0, m = k - j instances are the Newton coefficients themselves
    return t.outcome()


# ---------------------------------------------------------------------------
# growth of Q_k
# ---------------------------------------------------------------------------


@register(
    "absolute_monotonicity",
    "all forward differences of Q_k are nonnegative",
    k_min=Param(0, lo=0, hi=24),
    k_max=Param(8, lo=0, hi=24),
    reach=Param(16, lo=0, hi=64),
)
def absolute_monotonicity(k_min, k_max, reach):
    t = Tally()
    for k in range(k_min, k_max + 1):
        rows = forward_differences([q_direct(k, n) for n in range(reach + 1)])
        for m, row in enumerate(rows):
            for n, v in enumerate(row):
                t.add(v, k=k, m=m, n=n)
    return t.outcome()


def _three_circles_sides(q1, q2, q4, n):
    def build(p):
        err = pow2_neg_bounds(sqrt_bounds(n, p), p)
        rhs = 2 * sqrt_bounds(q1 * q4, p) + err * q4
        return q2, rhs

    return build


@register(
    "three_circles",
    "Q_k(2n) <= 2 sqrt(Q_k(n) Q_k(4n)) + 2^-sqrt(n) Q_k(4n)",
    k_min=Param(0, lo=0, hi=40),
    k_max=Param(8, lo=0, hi=40),
    n_min=Param(1, lo=0, hi=4096),
    n_max=Param(16, lo=0, hi=4096),
    precision=Param(64, lo=16, hi=MAX_PRECISION),
    max_precision=Param(256, lo=16, hi=MAX_PRECISION),
)
def three_circles(k_min, k_max, n_min, n_max, precision, max_precision):
    t = IntervalTally()
    for k in range(k_min, k_max + 1):
        series = coeffs_by_recursion(k)
        for n in range(n_min, n_max + 1):
            q1, q2, q4 = (q_newton(series, m) for m in (n, 2 * n, 4 * n))
            v, margin, p = certify_le(_three_circles_sides(q1, q2, q4, n), precision, max_precision)
            t.add(v, margin, p, k=k, n=n)
    return t.outcome()


@register(
    "leading_coefficient",
    "k -> a_{k,j} has constant j-th difference 4^-j",
    j_max=Param(4, lo=0, hi=10),
    span=Param(8, lo=1, hi=24),
)
def leading_coefficient(j_max, span):
    t = Tally()
    for j in range(j_max + 1):
        seq = [coeffs_by_recursion(k)[j] for k in range(j, j + span + 1)]
        rows = forward_differences(seq)
        for i, v in enumerate(rows[j] if j < len(rows) else []):
            t.add(-abs(v - Fraction(1, 4**j)), j=j, order=j, k=j + i)
        for i, v in enumerate(rows[j + 1] if j + 1 < len(rows) else []):
            t.add(-abs(v), j=j, order=j + 1, k=j + i)
    return t.outcome()


@register(
    "coefficient_global_bound",
    "0 <= a_{k,j} <= B1 C(A1 k, j)",
    k_min=Param(0, lo=0, hi=40),
    k_max=Param(12, lo=0, hi=40),
    A1=Param(Fraction(A1), "rational", lo=0),
    B1=Param(Fraction(B1), "rational", lo=0),
)
def coefficient_global_bound(k_min, k_max, A1, B1):
    t = Tally()
    for k in range(k_min, k_max + 1):
        series = coeffs_by_recursion(k)
        for j, a in enumerate(series.coeffs):
            t.add(min(a, B1 * binom_general(A1 * k, j) - a), k=k, j=j, a=a)
    return t.outcome(constants_used={"A1": A1, "B1": B1})


@register(
    "truncation_bracket",
    "lower Newton sum <= Q_k(n) <= B * upper Newton sum on 2k < n <= 4k^2",
    k_min=Param(1, lo=1, hi=30),
    k_max=Param(10, lo=1, hi=30),
    A=Param(Fraction(TRUNC_A), "rational", lo=5),
    B=Param(TRUNC_B, "rational", lo=1),
    direct_n_max=Param(24, lo=0, hi=64, quick=12),
)
def truncation_bracket(k_min, k_max, A, B, direct_n_max):
    t = Tally()
    for k in range(k_min, k_max + 1):
        series = coeffs_by_recursion(k)
        for n in range(2 * k + 1, 4 * k * k + 1):
            q = q_newton(series, n)
            if n <= direct_n_max and q != q_direct(k, n):
                t.add(-1, k=k, n=n, reason="newton value differs from direct value")
                continue
            lo = q_truncated(series, n, lower_cutoff(k, n))
            hi = B * q_truncated(series, n, upper_cutoff(k, n, A))
            t.add(min(q - lo, hi - q), k=k, n=n)
    return t.outcome(constants_used={"A": A, "B": B})


# ---------------------------------------------------------------------------
# rough bounds
# ---------------------------------------------------------------------------


@register(
    "fk_bound",
    "F_j(x)^2 <= x^(2j)/j!^2 + 1 on half-integers",
    j_max=Param(10, lo=0, hi=40),
    x_max=Param(15, lo=0, hi=200),
)
def fk_bound(j_max, x_max):
    t = Tally()
    for j in range(j_max + 1):
        for x2 in range(-2 * x_max, 2 * x_max + 1):
            x = Fraction(x2, 2)
            t.add(x ** (2 * j) / math.factorial(j) ** 2 + 1 - eval_F(j, x) ** 2, j=j, x=x)
    return t.outcome()


@register(
    "zk_bound",
    "|Z~_k(x,y)|^2 <= 3 20^k sum_l (x^2l + y^2l)/(4^l l!^2)",
    k_min=Param(0, lo=0, hi=30),
    k_max=Param(8, lo=0, hi=30),
    radius=Param(10, lo=0, hi=100),
)
def zk_bound(k_min, k_max, radius):
    t = Tally()
    for k in range(k_min, k_max + 1):
        for x, y in product(range(-radius, radius + 1), repeat=2):
            bound = 3 * 20**k * sum(
                (Fraction(x ** (2 * l) + y ** (2 * l), 4**l * math.factorial(l) ** 2) for l in range(k + 1)),
                Fraction(0),
            )
            t.add(bound - eval_Z_tilde(k, (x, y)).abs2, k=k, x=x, y=y)
    return t.outcome()


@register(
    "moment_bound",
    "E x^(2k)(S_n) <= (2k)!/(4^k k!) n^k",
    k_min=Param(0, lo=0, hi=20),
    k_max=Param(5, lo=0, hi=20),
    n_min=Param(0, lo=0, hi=400),
    n_max=Param(40, lo=0, hi=400),
)
def moment_bound(k_min, k_max, n_min, n_max):
    t = Tally()
    for n in range(n_min, n_max + 1):
        d = walk_distribution(n)
        for k in range(k_min, k_max + 1):
            bound = Fraction(math.factorial(2 * k), 4**k * math.factorial(k)) * n**k
            t.add(bound - coordinate_moment(d, 2 * k), k=k, n=n)
    return t.outcome()


@register(
    "q_rough_bound",
    "Q~_k(n) < 8 (20n)^k / k! for n >= k, < 8 (20e)^k for n < k",
    k_min=Param(0, lo=0, hi=24),
    k_max=Param(8, lo=0, hi=24),
    n_max=Param(16, lo=0, hi=64),
)
def q_rough_bound(k_min, k_max, n_max):
    # a lower bound on 20e makes the second branch harder to pass, which is the sound side
    e_lo = e_bounds(64).lo_fraction()
    t = Tally(strict=True)
    for k in range(k_min, k_max + 1):
        for n in range(n_max + 1):
            if n >= k:
                bound = Fraction(8 * (20 * n) ** k, math.factorial(k))
            else:
                bound = 8 * (20 * e_lo) ** k
            t.add(bound - q_tilde(k, n), k=k, n=n)
    return t.outcome(constants_used={"e_lower": e_lo})


# ---------------------------------------------------------------------------
# binomial sums
# ---------------------------------------------------------------------------


def _random_rational(rng: random.Random, num: int, den: int) -> Fraction:
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


@register(
    "vandermonde",
    "sum_j C(a, k-j) C(b, j) = C(a+b, k) for random rational a, b",
    samples=Param(500, lo=1, hi=10**6, quick=200),
    k_max=Param(12, lo=0, hi=60),
    seed=Param(0, lo=0),
)
def vandermonde(samples, k_max, seed):
    rng = random.Random(seed)
    t = Tally()
    for _ in range(samples):
        a, b = _random_rational(rng, 60, 12), _random_rational(rng, 60, 12)
        k = rng.randint(0, k_max)
        t.add(-abs(head_sum(a, b, k, k) - binom_general(a + b, k)), a=a, b=b, k=k)
    return t.outcome(details={"seed": seed})


def _tail_grid(k_min, k_max, a_max, b_den):
    """(a, b, k) with integer a in [2k, a_max], b = i/b_den in (0, a/(6e)], all C(b, j) >= 0."""
    e_hi = e_bounds(64).hi_fraction()
    for k in range(k_min, k_max + 1):
        for a in range(max(2 * k, 1), a_max + 1):
            i = 1
            while True:
                b = Fraction(i, b_den)
                if b > a / (6 * e_hi):
                    break
                if b.denominator == 1 or b >= k - 1:
                    yield a, b, k
                i += 1


_TAIL_PARAMS = dict(
    k_min=Param(1, lo=1, hi=20),
    k_max=Param(8, lo=1, hi=20),
    a_max=Param(200, lo=2, hi=2000, quick=120),
    b_den=Param(4, lo=1, hi=64, quick=2),
)


@register("tail_estimate", "sum over j > 6ekb/a of C(a,k-j) C(b,j) <= C(a,k)/2", **_TAIL_PARAMS)
def tail_estimate(k_min, k_max, a_max, b_den):
    t = Tally()
    for a, b, k in _tail_grid(k_min, k_max, a_max, b_den):
        jt = tail_threshold(a, b, k)
        t.add(Fraction(math.comb(a, k), 2) - tail_sum(a, b, k, jt), a=a, b=b, k=k, j_from=jt)
    return t.outcome(constants_used={"e_enclosure": e_bounds(64)})


@register("head_estimate", "sum over j <= 6ekb/a of C(a,k-j) C(b,j) >= C(a+b,k)/2", **_TAIL_PARAMS)
def head_estimate(k_min, k_max, a_max, b_den):
    t = Tally()
    for a, b, k in _tail_grid(k_min, k_max, a_max, b_den):
        jt = tail_threshold(a, b, k)
        t.add(head_sum(a, b, k, jt - 1) - binom_general(a + b, k) / 2, a=a, b=b, k=k, j_to=jt - 1)
    return t.outcome(constants_used={"e_enclosure": e_bounds(64)})


@register(
    "model_abs_monotone",
    "forward differences of n -> C(n + alpha k, k) up to order k are >= 0 on n >= k",
    k_min=Param(1, lo=1, hi=40),
    k_max=Param(10, lo=1, hi=40),
    alphas=Param([Fraction(0), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(1)], "rationals", lo=0, hi=1),
    n_span=Param(12, lo=0, hi=200),
)
def model_abs_monotone(k_min, k_max, alphas, n_span):
    t = Tally()
    for k in range(k_min, k_max + 1):
        for alpha in alphas:
            p = ModelParams(k, alpha)
            rows = forward_differences([f_model(p, n) for n in range(k, 2 * k + n_span + 1)])
            for order in range(k + 1):
                for i, v in enumerate(rows[order][: n_span + 1]):
                    t.add(v, k=k, alpha=alpha, order=order, n=k + i)
    return t.outcome()


@register(
    "pair_product",
    "F(y) F(z) >= 1 for y + z >= 0, |y|, |z| < n",
    samples=Param(1000, lo=1, hi=10**6, quick=300),
    n_max=Param(50, lo=1, hi=10**6),
    seed=Param(0, lo=0),
)
def pair_product(samples, n_max, seed):
    rng = random.Random(seed)
    t = Tally()
    for _ in range(samples):
        n = rng.randint(1, n_max)
        den = rng.randint(1, 50)
        lim = n * den - 1  # |y| < n
        y = Fraction(rng.randint(-lim, lim), den)
        z_lo = max(-y, Fraction(-lim, den))
        z = Fraction(rng.randint(math.ceil(z_lo * den), lim), den)
        t.add(pair_factor(n, y) * pair_factor(n, z) - 1, n=n, y=y, z=z)
    return t.outcome(details={"seed": seed})


# ---------------------------------------------------------------------------
# Newton coefficients, comparison and the model family
# ---------------------------------------------------------------------------


@register(
    "recursion",
    "Newton coefficients by differences equal those by the Q~ recursion",
    k_min=Param(0, lo=0, hi=40),
    k_max=Param(12, lo=0, hi=40, quick=10),
)
def recursion(k_min, k_max):
    t = Tally()
    for k in range(k_min, k_max + 1):
        d, r = coeffs_by_difference(k), coeffs_by_recursion(k)
        for j in range(k + 1):
            t.add(-abs(d[j] - r[j]), k=k, j=j)
    return t.outcome()


def check_recursion_consistency(k: int):
    """Exact comparison of both coefficient algorithms at one k."""
    from .registry import run_check

    return run_check("recursion", {"k": k})


def default_comparison_ns(k: int) -> list[int]:
    return sorted({max(1, 2 * k), max(1, 4 * k), max(1, -(-k * k // 2)), max(1, k * k), max(1, 2 * k * k), max(1, 4 * k * k)})


@register(
    "comparison",
    "Q_k(n) >= C(n + k/4, k)/4 for n >= k^2/2; the ratio range is reported",
    k_values=Param([4, 8, 12, 16], "ints", lo=0, hi=64),
    n_values=Param([], "ints", lo=1),
)
def comparison(k_values, n_values):
    t = Tally()
    per_k = {}
    unasserted = []
    for k in k_values:
        series = coeffs_by_recursion(k)
        ns = n_values or default_comparison_ns(k)
        rs = []
        for n in ns:
            f = binom_general(n + Fraction(k, 4), k)
            if f <= 0:
                unasserted.append({"k": k, "n": n, "reason": "model value not positive"})
                continue
            r = q_newton(series, n) / f
            rs.append(r)
            if 2 * n >= k * k:
                t.add(r - Fraction(1, 4), k=k, n=n, ratio=r)
            else:
                unasserted.append({"k": k, "n": n, "ratio": r})
        if rs:
            per_k[k] = {"r_min": min(rs), "r_max": max(rs)}
    all_r = [v for d in per_k.values() for v in d.values()]
    details = {"per_k": per_k, "reported_only": unasserted}
    if all_r:
        details["C_emp"] = max(all_r)
    return t.outcome(details=details, constants_used={"lower_constant": Fraction(1, 4), "alpha": Fraction(1, 4)})


def check_comparison(k: int, n_values=None):
    from .registry import run_check

    return run_check("comparison", {"k_values": [k], "n_values": list(n_values or [])})


def _binomial_sides(p: ModelParams, n: int, eps: Fraction, C: Fraction):
    """Both sides of f(2n) > C sqrt(f(n) f(4n)) + 2^-t f(4n), t = n^(1/2+eps).

    For k up to EXACT_K_LIMIT the sides are the binomial values themselves;
    beyond it everything is divided by f(4n) and formed from the factor
    ratios D = f(2n)/f(4n) and L = f(2n)^2/(f(n)f(4n)):
        D > C D / sqrt(L) + 2^-t.
    """

    def build(prec):
        err = pow2_neg_bounds(real_power_bounds(n, Fraction(1, 2) + eps, prec), prec)
        if p.k <= EXACT_K_LIMIT:
            f1, f2, f4 = f_model(p, n), f_model(p, 2 * n), f_model(p, 4 * n)
            return C * sqrt_bounds(f1 * f4, prec) + err * f4, f2
        r = model_ratios_interval(p, n, prec)
        return C * r.decay / r.logconv.sqrt() + err, r.decay

    return build


@register(
    "binomial_family",
    "f(2n) > C sqrt(f(n) f(4n)) + 2^-(n^(1/2+eps)) f(4n) for f(n) = C(n + alpha k, k)",
    alpha=Param(Fraction(1, 4), "rational", lo=0, hi=1),
    eps=Param(Fraction(1, 2), "rational", lo=0, hi=10),
    C=Param(Fraction(3), "rational", lo=0),
    k=Param(10**4, lo=1, hi=10**6),
    n=Param(10**6, lo=1, hi=10**12),
    precision=Param(DEFAULT_PRECISION, lo=16, hi=MAX_PRECISION),
    max_precision=Param(MAX_PRECISION, lo=16, hi=MAX_PRECISION),
)
def binomial_family(alpha, eps, C, k, n, precision, max_precision):
    p = ModelParams(k, alpha)
    if not factors_positive(p, n):
        raise CheckError(f"n={n} leaves a nonpositive factor in C(n + {alpha}*{k}, {k})")
    # strict: rhs < f(2n)
    v, margin, used = certify_le(_binomial_sides(p, n, eps, C), precision, max_precision, strict=True)
    r = model_ratios(p, n, used)
    details = {
        "path": "exact" if k <= EXACT_K_LIMIT else "factor_product",
        "precision_used": used,
        "logconv": r.logconv,
        "decay": r.decay,
        "margin_normalization": "f(4n)" if k > EXACT_K_LIMIT else "none",
    }
    witness = {"k": k, "n": n, "alpha": alpha, "C": C, "eps": eps, "margin": margin}
    return Outcome(v, margin, [witness], details=details)


def check_binomial_family(alpha, eps, C, k, n, precision=DEFAULT_PRECISION, max_precision=MAX_PRECISION):
    from .registry import run_check

    return run_check(
        "binomial_family",
        {"alpha": alpha, "eps": eps, "C": C, "k": k, "n": n, "precision": precision, "max_precision": max_precision},
    )


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------


@register(
    "monte_carlo",
    "sample means of |Z_k(S_n)|^2 agree with exact Q_k(n) within z standard errors",
    k_min=Param(0, lo=0, hi=12),
    k_max=Param(4, lo=0, hi=12),
    n_min=Param(1, lo=0, hi=200),
    n_max=Param(20, lo=0, hi=200),
    samples=Param(100_000, lo=2, hi=10**7, quick=20_000),
    seed=Param(20240501, lo=0),
    z=Param(Fraction(5), "rational", lo=0),
    min_fraction=Param(Fraction(95, 100), "rational", lo=0, hi=1),
)
def monte_carlo(k_min, k_max, n_min, n_max, samples, seed, z, min_fraction):
    cells = ok = 0
    misses = []
    worst = None
    for k in range(k_min, k_max + 1):
        for n in range(n_min, n_max + 1):
            cell_seed = seed + 1000 * k + n
            est = monte_carlo_Q(k, n, samples, cell_seed)
            exact = q_direct(k, n)
            dev = abs(Fraction(est.mean) - exact)
            se = Fraction(est.standard_error)
            cells += 1
            # zero spread means every sample hit the same value; then the mean is exact
            good = dev <= z * se if se > 0 else dev == 0
            ok += good
            score = dev / se if se > 0 else (Fraction(0) if dev == 0 else None)
            entry = {"k": k, "n": n, "seed": cell_seed, "mean": est.mean, "standard_error": est.standard_error,
                     "exact": exact, "z_score": score}
            if not good:
                misses.append(entry)
            if score is not None and (worst is None or score > worst["z_score"]):
                worst = entry
    frac = Fraction(ok, cells) if cells else Fraction(1)
    verdict = CheckVerdict.PASS if frac >= min_fraction else CheckVerdict.FAIL
    witnesses = misses[:WITNESS_LIMIT] if verdict is CheckVerdict.FAIL else ([worst] if worst else [])
    details = {"cells": cells, "within": ok, "fraction": format_rational(frac), "outside": misses[:WITNESS_LIMIT]}
    return Outcome(verdict, frac - min_fraction, witnesses, details=details)

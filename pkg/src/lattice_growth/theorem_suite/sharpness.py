"""Search for grid points where Q_k beats the error-free three circles bound.

For each (k, n) the search decides

    Q_k(2n) > A sqrt(Q_k(n) Q_k(4n)) + 2^-(n^(1/2+eps)) Q_k(4n)

and records the largest constant the cell supports,

    A*(k, n) = (Q_k(2n) - 2^-(n^(1/2+eps)) Q_k(4n)) / sqrt(Q_k(n) Q_k(4n)),

as an interval.  All Q values come from the Newton expansion, so only walks
of at most k steps are ever enumerated.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, Union

from ..exact_arith import (
    DEFAULT_PRECISION,
    MAX_PRECISION,
    DyadicInterval,
    dyadic_cmp,
    pow2_neg_bounds,
    real_power_bounds,
    sqrt_bounds,
)
from ..growth_newton import CoeffCache, NewtonSeries, coeffs_by_recursion, q_newton
from .report import CheckVerdict, SearchReport, certify_le

NRange = Union[tuple, Callable[[int], Iterable[int]]]


def _n_values(n_range: NRange, k: int) -> list[int]:
    if callable(n_range):
        return sorted(set(n_range(k)))
    lo, hi = n_range
    return list(range(max(lo, 1), hi + 1))


def n_multiples(lo_mult: Fraction, hi_mult: Fraction) -> Callable[[int], range]:
    """n_range [ceil(lo_mult k), floor(hi_mult k)], e.g. (2, 4) for n in [2k, 4k]."""
    lo_mult, hi_mult = Fraction(lo_mult), Fraction(hi_mult)

    def rng(k: int) -> range:
        lo = -((-lo_mult.numerator * k) // lo_mult.denominator)
        hi = (hi_mult.numerator * k) // hi_mult.denominator
        return range(max(lo, 1), hi + 1)

    return rng


def evaluate_cell(series: NewtonSeries, n: int, A: Fraction, eps: Fraction, precision: int, max_precision: int):
    """Verdict, certified margin and A* enclosure for one grid cell."""
    q1, q2, q4 = (q_newton(series, m) for m in (n, 2 * n, 4 * n))
    expo = Fraction(1, 2) + eps

    def build(p):
        err = pow2_neg_bounds(real_power_bounds(n, expo, p), p)
        return A * sqrt_bounds(q1 * q4, p) + err * q4, q2

    verdict, margin, used = certify_le(build, precision, max_precision, strict=True)
    a_star = None
    if q1 * q4 > 0:
        err = pow2_neg_bounds(real_power_bounds(n, expo, used), used)
        a_star = (q2 - err * q4) / sqrt_bounds(q1 * q4, used)
    return verdict, margin, used, a_star


def _search_k(args):
    k, ns, A, eps, precision, max_precision, series = args
    if series is None:
        series = coeffs_by_recursion(k)
    rows = []
    for n in ns:
        rows.append((k, n, *evaluate_cell(series, n, A, eps, precision, max_precision)))
    return series, rows


def sharpness_search(
    A,
    eps,
    k_range: Sequence[int],
    n_range: NRange,
    precision: int = DEFAULT_PRECISION,
    max_precision: int = MAX_PRECISION,
    cache: Optional[CoeffCache] = None,
    jobs: int = 1,
) -> SearchReport:
    """Certify or refute the strengthened inequality on every cell of the grid.

    ``k_range`` is an inclusive pair (k_min, k_max); ``n_range`` is either an
    inclusive pair or a function mapping k to its n values.  Cells are
    evaluated per k (in parallel when ``jobs > 1``) and merged in (k, n) order.
    """
    A, eps = Fraction(A), Fraction(eps)
    if A < 0 or eps < 0:
        raise ValueError("A and eps must be nonnegative")
    start = time.perf_counter()
    k_min, k_max = k_range
    tasks = []
    for k in range(max(k_min, 0), k_max + 1):
        ns = _n_values(n_range, k)
        if not ns:
            continue
        cached = None
        if cache is not None and all((k, j) in cache for j in range(k + 1)):
            cached = coeffs_by_recursion(k, cache)
        tasks.append((k, ns, A, eps, precision, max_precision, cached))

    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks), os.cpu_count() or 1)) as pool:
            results = list(pool.map(_search_k, tasks))
    else:
        results = [_search_k(t) for t in tasks]

    witnesses, inconclusive = [], []
    best_lo = best_hi = None
    best_cell = None
    cells = 0
    used_max = precision if tasks else 0
    for series, rows in results:
        if cache is not None:
            for j, v in enumerate(series.coeffs):
                cache.put(series.k, j, v)
        for k, n, verdict, margin, used, a_star in rows:
            cells += 1
            used_max = max(used_max, used)
            if verdict is CheckVerdict.PASS:
                witnesses.append({"k": k, "n": n, "margin": margin, "precision": used})
            elif verdict is CheckVerdict.INCONCLUSIVE:
                inconclusive.append({"k": k, "n": n, "margin": margin})
            if a_star is not None:
                if best_lo is None or dyadic_cmp(a_star.lo, best_lo) > 0:
                    best_lo, best_cell = a_star.lo, {"k": k, "n": n, "A_star": a_star}
                if best_hi is None or dyadic_cmp(a_star.hi, best_hi) > 0:
                    best_hi = a_star.hi
    if cache is not None:
        cache.save()

    grid = {
        "k_min": k_min,
        "k_max": k_max,
        "n_values": {t[0]: [t[1][0], t[1][-1]] for t in tasks},
    }
    best = DyadicInterval(best_lo, best_hi, used_max) if best_lo is not None else None
    return SearchReport(
        grid=grid,
        A=A,
        eps=eps,
        best_A=best,
        best_cell=best_cell,
        witnesses=witnesses,
        cells=cells,
        inconclusive=inconclusive,
        elapsed_ms=int(round((time.perf_counter() - start) * 1000)),
        precision=used_max,
    )

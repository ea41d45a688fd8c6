"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are written to the
terminal even when output capture is on).
"""

import math
import time
from fractions import Fraction

import pytest

from lattice_growth.growth_newton import coeffs_by_difference, coeffs_by_recursion, q_direct, q_newton
from lattice_growth.theorem_suite import (
    CheckVerdict,
    check_binomial_family,
    check_comparison,
    n_multiples,
    run_check,
    sharpness_search,
)


@pytest.fixture
def verdict_line(capsys):
    def emit(number: int, ok: bool, text: str) -> None:
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {text}")
        assert ok, text

    return emit


def test_criterion_01_recursion_matches_differences(verdict_line):
    start = time.perf_counter()
    mismatched = [k for k in range(13) if coeffs_by_difference(k) != coeffs_by_recursion(k)]
    seconds = time.perf_counter() - start
    verdict_line(1, not mismatched and seconds < 60,
                 f"recursion = differences for k <= 12, mismatches {mismatched}, {seconds:.2f} s (budget 60 s)")


def test_criterion_02_first_coefficients(verdict_line):
    bad = []
    for k in range(13):
        a = coeffs_by_recursion(k)
        if a[0] != 1 or (k >= 1 and a[1] != Fraction(k - 1, 4)):
            bad.append(k)
    verdict_line(2, not bad, f"a_k0 = 1 and a_k1 = (k-1)/4 for k <= 12, failures {bad}")


def test_criterion_03_newton_equals_direct(verdict_line):
    bad = [(k, n) for k in range(9) for n in range(21) if q_newton(coeffs_by_recursion(k), n) != q_direct(k, n)]
    verdict_line(3, not bad, f"q_newton = q_direct on k <= 8, n <= 20 ({9 * 21} cells), failures {bad}")


def test_criterion_04_exact_identities(verdict_line):
    ids = ["harmonicity", "shift_identity", "laplace_power_identity", "derivative_laplacian"]
    reports = [run_check(i) for i in ids]
    ok = all(r.verdict is CheckVerdict.PASS and r.margin == 0 for r in reports)
    verdict_line(4, ok, ", ".join(f"{r.check_id} {r.verdict.value} margin {r.margin}" for r in reports))


def test_criterion_05_absolute_monotonicity(verdict_line):
    r = run_check("absolute_monotonicity", {"k_min": 0, "k_max": 8, "reach": 16})
    verdict_line(5, r.verdict is CheckVerdict.PASS and r.margin >= 0,
                 f"forward differences of Q_k, k <= 8, reach 16: {r.verdict.value}, min value {r.margin}")


def test_criterion_06_leading_coefficient(verdict_line):
    r = run_check("leading_coefficient", {"j_max": 4, "span": 8})
    verdict_line(6, r.verdict is CheckVerdict.PASS and r.margin == 0,
                 f"j-th difference in k of a_kj is 4^-j, next is 0, j <= 4: {r.verdict.value}")


def test_criterion_07_three_circles_certified(verdict_line):
    r = run_check("three_circles", {"k_min": 0, "k_max": 8, "n_min": 1, "n_max": 16, "max_precision": 256})
    used = r.details["max_precision_used"]
    verdict_line(7, r.verdict is CheckVerdict.PASS and used <= 256,
                 f"three circles with error, k <= 8, n <= 16: {r.verdict.value} at {used} bits (cap 256)")


BOUNDS = ["fk_bound", "zk_bound", "moment_bound", "q_rough_bound", "tail_estimate", "head_estimate",
          "vandermonde", "pair_product", "model_abs_monotone", "coefficient_global_bound", "truncation_bracket"]


def test_criterion_08_bounds_suite(verdict_line):
    start = time.perf_counter()
    reports = [run_check(i) for i in BOUNDS]
    seconds = time.perf_counter() - start
    failed = [r.summary() for r in reports if r.verdict is not CheckVerdict.PASS or r.margin < 0]
    verdict_line(8, not failed and seconds < 600,
                 f"{len(BOUNDS)} bound checks PASS with margins >= 0, failures {failed}, {seconds:.1f} s (budget 600 s)")


def test_criterion_09_binomial_family_saturation(verdict_line):
    start = time.perf_counter()
    r = check_binomial_family(Fraction(1, 4), Fraction(1, 2), 3, 10**4, 10**6, max_precision=512)
    seconds = time.perf_counter() - start
    used = r.details["precision_used"]
    verdict_line(9, r.verdict is CheckVerdict.PASS and used <= 512 and seconds < 30,
                 f"binomial family k = 10^4, n = 10^6: {r.verdict.value} at {used} bits in {seconds:.2f} s "
                 f"(caps 512 bits, 30 s)")


def test_criterion_10_sharpness_witness(verdict_line):
    start = time.perf_counter()
    r = sharpness_search(1, Fraction(3, 5), (40, 60), n_multiples(2, 4))
    seconds = time.perf_counter() - start
    best = r.best_cell
    verdict_line(10, len(r.witnesses) >= 1 and not r.inconclusive and seconds < 1200,
                 f"{len(r.witnesses)} witnesses in {r.cells} cells, best_A in "
                 f"[{float(r.best_A.lo_fraction()):.4f}, {float(r.best_A.hi_fraction()):.4f}] "
                 f"at k = {best['k']}, n = {best['n']}, {seconds:.1f} s (budget 1200 s)")


def test_criterion_11_comparison_lower_bound(verdict_line):
    results = []
    for k in (4, 8, 12, 16):
        ns = [math.ceil(k * k / 2), k * k, 2 * k * k, 4 * k * k]
        r = check_comparison(k, ns)
        results.append((k, r))
    ok = all(r.verdict is CheckVerdict.PASS and not r.details["reported_only"] for _, r in results)
    spread = ", ".join(
        f"k={k}: ratio in [{float(r.details['per_k'][k]['r_min']):.4f}, {float(r.details['per_k'][k]['r_max']):.4f}]"
        for k, r in results
    )
    verdict_line(11, ok, f"Q_k(n) >= C(n + k/4, k)/4 on every cell; {spread}")


def test_criterion_12_monte_carlo(verdict_line):
    r = run_check("monte_carlo", {"k_min": 0, "k_max": 4, "n_min": 1, "n_max": 20, "samples": 100_000})
    d = r.details
    verdict_line(12, r.verdict is CheckVerdict.PASS,
                 f"{d['within']}/{d['cells']} cells within 5 standard errors (need 95%)")

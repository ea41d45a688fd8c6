import math
from fractions import Fraction

import pytest

from lattice_growth.growth_newton import (
    CACHE_ENV,
    TRUNC_A,
    TRUNC_B,
    CoeffCache,
    NewtonSeries,
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
from lattice_growth.harmonic_lattice import eval_Z
from lattice_growth.random_walk import expect, walk_distribution

A_5 = (Fraction(1), Fraction(1), Fraction(15, 64), Fraction(1, 128), Fraction(9, 16384), Fraction(0))


def test_q_direct_examples():
    assert all(q_direct(0, n) == 1 for n in range(10))
    assert q_direct(1, 5) == 5
    assert q_direct(2, 0) == 0
    assert q_tilde(1, 7) == 7
    with pytest.raises(ValueError):
        q_direct(1, 1, "bogus")


@pytest.mark.parametrize("k, n", [(2, 3), (3, 4), (4, 6)])
def test_q_direct_matches_reference_evaluation(k, n):
    # reference path: explicit products for Z_k, full (non-wedge) expectation
    from lattice_growth.harmonic_lattice import HalfPoint

    ref = expect(walk_distribution(n), lambda x, y: eval_Z(k, HalfPoint(2 * x, 2 * y)).abs2)
    assert q_direct(k, n) == ref


def test_forward_differences_examples():
    assert forward_differences([0, 1, 4, 9]) == [[0, 1, 4, 9], [1, 3, 5], [2, 2], [0]]
    assert all(all(v == 0 for v in row) for row in forward_differences([7] * 5)[1:])
    rows = forward_differences([math.comb(n, 2) for n in range(5)])
    assert rows[1] == [math.comb(n, 1) for n in range(4)]
    with pytest.raises(ValueError):
        forward_differences([])


def test_coefficients_examples():
    assert coeffs_by_recursion(0).coeffs == (1,)
    assert coeffs_by_recursion(1).coeffs == (1, 0)
    assert coeffs_by_recursion(5).coeffs == A_5
    assert coeffs_by_difference(5).coeffs == A_5


@pytest.mark.parametrize("k", range(0, 13))
def test_recursion_equals_differences(k):
    assert coeffs_by_recursion(k) == coeffs_by_difference(k)


def test_first_two_coefficients():
    for k in range(0, 13):
        a = coeffs_by_recursion(k)
        assert a[0] == 1
        if k >= 1:
            assert a[1] == Fraction(k - 1, 4)


@pytest.mark.parametrize("k", range(0, 9))
def test_newton_equals_direct(k):
    series = coeffs_by_recursion(k)
    for n in range(21):
        assert q_newton(series, n) == q_direct(k, n)


def test_truncated_sums():
    s = coeffs_by_recursion(4)
    assert q_truncated(s, 9, 4) == q_newton(s, 9)
    assert q_truncated(s, 9, 0) == math.comb(9, 4)
    vals = [q_truncated(s, 9, j) for j in range(5)]
    assert vals == sorted(vals)
    with pytest.raises(ValueError):
        q_truncated(s, 9, 5)
    n = 16
    lo = q_truncated(s, n, lower_cutoff(4, n))
    hi = TRUNC_B * q_truncated(s, n, upper_cutoff(4, n, TRUNC_A))
    assert lo <= q_direct(4, n) <= hi


def test_cutoffs():
    assert lower_cutoff(4, 16) == 4 and lower_cutoff(10, 400) == 2 and lower_cutoff(10, 1000) == 1
    assert upper_cutoff(4, 16) == 4 and upper_cutoff(3, 10**6) == 1


def test_series_length_is_checked():
    with pytest.raises(ValueError):
        NewtonSeries(2, (Fraction(1),))


def test_forward_derivative_examples():
    assert all(q_forward_derivative(1, 1, n) == 1 for n in range(6))
    assert all(q_forward_derivative(0, m, 3) == 0 for m in range(1, 4))
    assert all(q_forward_derivative(k, k, 0) == 1 for k in range(6))
    assert q_forward_derivative(3, 2, 4, "table") == q_forward_derivative(3, 2, 4, "laplacian") == Fraction(9, 2)
    with pytest.raises(ValueError):
        q_forward_derivative(1, 1, 1, "other")


def test_forward_derivative_methods_agree():
    for k in range(5):
        for m in range(4):
            for n in range(6):
                assert q_forward_derivative(k, m, n, "table") == q_forward_derivative(k, m, n, "laplacian")


# -- cache -----------------------------------------------------------------


def test_cache_round_trip(tmp_path):
    path = tmp_path / "sub" / "coeffs.csv"
    c = CoeffCache(path)
    s = coeffs_by_recursion(6, c)
    c.save()
    text = path.read_text()
    assert text.startswith("#lattice-growth-coeffs v1\n") and "6,2," in text
    again = CoeffCache(path)
    assert len(again) == 7 and coeffs_by_recursion(6, again) == s


def test_cache_put_is_idempotent_and_detects_conflicts(tmp_path):
    c = CoeffCache(tmp_path / "c.csv")
    c.put(2, 1, Fraction(1, 4))
    c.put(2, 1, Fraction(1, 4))
    with pytest.raises(ValueError):
        c.put(2, 1, Fraction(1, 3))


def test_cache_rejects_foreign_files(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("something else\n")
    with pytest.raises(ValueError):
        CoeffCache(p)
    p.write_text("#lattice-growth-coeffs v1\n1,2,x\n")
    with pytest.raises(ValueError):
        CoeffCache(p)


def test_cache_location_precedence(tmp_path, monkeypatch):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path / "env.csv"))
    assert CoeffCache.default(tmp_path / "flag.csv").path == tmp_path / "flag.csv"
    assert CoeffCache.default().path == tmp_path / "env.csv"
    monkeypatch.delenv(CACHE_ENV)
    assert CoeffCache.default().path.name == "coeffs.csv"
    assert CoeffCache.default().path.parent.name == ".lattice_growth_cache"


def test_cached_values_are_used(tmp_path):
    c = CoeffCache(tmp_path / "c.csv")
    c.put(3, 2, Fraction(99))
    assert coeffs_by_recursion(3, c)[2] == 99

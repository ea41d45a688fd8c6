import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lattice_growth.exact_arith import binom_general, e_bounds
from lattice_growth.model_family import (
    ModelParams,
    f_model,
    head_sum,
    model_forward_difference,
    model_ratios,
    model_ratios_interval,
    pair_factor,
    ratios,
    tail_sum,
    tail_threshold,
    vandermonde_sum,
)

ALPHAS = [Fraction(0), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(1)]


def test_model_values():
    assert f_model(ModelParams(4, Fraction(1, 4)), 10) == 330
    assert f_model(ModelParams(2, Fraction(1, 4)), 3) == Fraction(35, 8)
    p = ModelParams(3, 1)
    assert [f_model(p, n) for n in (2, 4, 8)] == [10, 35, 165]


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(0, 0)
    with pytest.raises(ValueError):
        ModelParams(3, Fraction(3, 2))


def test_ratio_examples():
    r = ratios(10, 35, 165)
    assert r.logconv == Fraction(1225, 1650) and r.decay == Fraction(35, 165)
    assert ratios(7, 7, 7) == ratios(1, 1, 1)
    assert ratios(3, 6, 12).logconv == 1
    with pytest.raises(ValueError):
        ratios(0, 1, 1)


@pytest.mark.parametrize("k", range(1, 21))
@pytest.mark.parametrize("alpha", ALPHAS)
def test_interval_ratios_contain_exact(k, alpha):
    p = ModelParams(k, alpha)
    n = k + 3
    exact = model_ratios(p, n)
    enc = model_ratios_interval(p, n, 64)
    assert enc.logconv.contains(exact.logconv) and enc.decay.contains(exact.decay)


def test_interval_ratios_small_case_and_refinement():
    p = ModelParams(3, 1)
    enc = model_ratios_interval(p, 2, 64)
    assert enc.logconv.contains(Fraction(1225, 1650))
    coarse, fine = model_ratios_interval(p, 50, 32), model_ratios_interval(p, 50, 128)
    assert fine.logconv.width() <= coarse.logconv.width()
    with pytest.raises(ValueError):
        model_ratios_interval(ModelParams(5, 0), 2, 64)


def test_large_model_logconv_exceeds_three():
    r = model_ratios(ModelParams(10**4, Fraction(1, 4)), 10**6, 128)
    assert r.logconv.lo_fraction() > 3


def test_vandermonde_examples():
    assert vandermonde_sum(3, 2, 2) == 10
    assert vandermonde_sum(Fraction(7, 2), Fraction(1, 2), 1) == 4
    assert vandermonde_sum(9, 0, 4) == math.comb(9, 4)


@settings(max_examples=200)
@given(st.fractions(max_denominator=20, min_value=-40, max_value=40),
       st.fractions(max_denominator=20, min_value=-40, max_value=40), st.integers(0, 12))
def test_vandermonde_property(a, b, k):
    assert head_sum(a, b, k, k) == binom_general(a + b, k)


def test_head_and_tail_examples():
    assert tail_threshold(100, 2, 5) == 2
    assert tail_sum(100, 2, 5, 2) == 161700 <= Fraction(math.comb(100, 5), 2) == 37643760
    assert head_sum(100, 2, 5, 1) == 83129970 >= Fraction(math.comb(102, 5), 2) == 41645835
    assert tail_sum(100, 2, 5, 6) == 0
    assert head_sum(100, 2, 5, -1) == 0


def test_tail_threshold_is_the_first_integer_above():
    e = e_bounds(256)
    for a, b, k in [(100, 2, 5), (60, Fraction(3, 2), 4), (200, Fraction(7, 4), 8), (17, 1, 1)]:
        t_lo = 6 * e.lo_fraction() * k * Fraction(b) / a
        t_hi = 6 * e.hi_fraction() * k * Fraction(b) / a
        j = tail_threshold(a, b, k)
        assert j > t_hi and j - 1 < t_lo


def test_tail_threshold_near_an_integer_refines():
    # 6ekb/a just below 3: b chosen so the threshold is 6e * 2 * b / a with a / b ~ 4e
    a, b, k = 108731, 10000, 2  # 6e*2*10000/108731 = 3.0000x
    t = 6 * 2 * Fraction(b, a) * Fraction(271828182845904523536, 10**20)
    assert tail_threshold(a, b, k) == math.floor(t) + 1


def test_pair_factor():
    assert pair_factor(4, 1) == Fraction(49, 45)
    assert pair_factor(4, -1) == Fraction(81, 85)
    assert pair_factor(4, 1) * pair_factor(4, -1) == Fraction(3969, 3825) > 1
    assert pair_factor(7, 0) == 1
    with pytest.raises(ValueError):
        pair_factor(4, 4)


def test_model_absolute_monotonicity_small():
    for k in range(1, 7):
        for alpha in ALPHAS:
            p = ModelParams(k, alpha)
            for n in range(k, k + 6):
                for order in range(k + 1):
                    assert model_forward_difference(p, order, n) >= 0

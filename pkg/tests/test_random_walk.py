import math
from fractions import Fraction

import pytest

from lattice_growth.harmonic_lattice import scaled_Z_abs2
from lattice_growth.random_walk import (
    coordinate_moment,
    expect,
    expect_int,
    monte_carlo_Q,
    sample_endpoints,
    symmetric_sum,
    walk_distribution,
    walk_distributions,
)


def closed_form_count(n, x, y):
    """Paths to (x, y): rotate by 45 degrees, two independent 1-d walks."""
    if (n + x + y) % 2 or abs(x) + abs(y) > n:
        return 0
    return math.comb(n, (n + x + y) // 2) * math.comb(n, (n + x - y) // 2)


def test_small_examples():
    assert walk_distribution(0).counts == {(0, 0): 1}
    assert walk_distribution(1).counts == {(1, 0): 1, (-1, 0): 1, (0, 1): 1, (0, -1): 1}
    assert walk_distribution(2).count(0, 0) == 4


@pytest.mark.parametrize("n", [0, 1, 2, 3, 7, 16, 33])
def test_counts_match_closed_form(n):
    d = walk_distribution(n)
    for x in range(-n - 1, n + 2):
        for y in range(-n - 1, n + 2):
            assert d.count(x, y) == closed_form_count(n, x, y)


def test_totals_up_to_200_steps():
    for d in walk_distributions(200):
        assert d.total() == 4**d.n


def test_lattice_symmetry_up_to_60_steps():
    for d in walk_distributions(60):
        c = d.counts
        for (x, y), v in c.items():
            assert c[(-x, y)] == c[(x, -y)] == c[(y, x)] == v


def test_memoized_and_incremental_agree():
    assert walk_distribution(45) == list(walk_distributions(45))[-1]


def test_expectations():
    d5, d4, d2 = walk_distribution(5), walk_distribution(4), walk_distribution(2)
    assert expect(d5, lambda x, y: 1) == 1
    assert expect(d5, lambda x, y: x * x + y * y) == 5
    assert expect(d4, lambda x, y: x * x) == 2
    assert expect_int(d2, lambda x, y: x**4) == Fraction(5, 2)


def test_second_moment_of_Z1_is_n():
    for n in range(61):
        d = walk_distribution(n)
        assert Fraction(symmetric_sum(d, lambda x, y: scaled_Z_abs2(1, 2 * x, 2 * y)), 4**n * 4) == n


def test_symmetric_sum_agrees_with_full_sum():
    for n in (0, 1, 5, 12):
        d = walk_distribution(n)
        f = lambda x, y: scaled_Z_abs2(3, x, y)
        assert symmetric_sum(d, f) == sum(c * f(x, y) for x, y, c in d.support())


def test_moment_examples():
    assert coordinate_moment(walk_distribution(4), 0) == 1
    assert coordinate_moment(walk_distribution(4), 2) == 2
    # two steps: x = +-1 with probability 1/4 each, x = +-2 with probability 1/16 each
    assert coordinate_moment(walk_distribution(2), 4) == Fraction(5, 2)
    with pytest.raises(ValueError):
        coordinate_moment(walk_distribution(2), 3)


def test_moment_bound_grid():
    for n in range(41):
        d = walk_distribution(n)
        for k in range(6):
            bound = Fraction(math.factorial(2 * k), 4**k * math.factorial(k)) * n**k
            assert coordinate_moment(d, 2 * k) <= bound


def test_monte_carlo_k0_is_exact():
    est = monte_carlo_Q(0, 7, 500, seed=1)
    assert Fraction(est.mean) == 1 and Fraction(est.standard_error) == 0


def test_monte_carlo_is_reproducible_and_seed_sensitive():
    a = monte_carlo_Q(2, 9, 2000, seed=42)
    assert a == monte_carlo_Q(2, 9, 2000, seed=42)
    assert a != monte_carlo_Q(2, 9, 2000, seed=43)
    assert (sample_endpoints(9, 100, 5) == sample_endpoints(9, 100, 5)).all()


def test_monte_carlo_k1_n5_within_five_standard_errors():
    est = monte_carlo_Q(1, 5, 100_000, seed=7)
    assert abs(Fraction(est.mean) - 5) <= 5 * Fraction(est.standard_error)


def test_monte_carlo_rejects_bad_arguments():
    with pytest.raises(ValueError):
        monte_carlo_Q(1, 5, 0, seed=1)
    with pytest.raises(ValueError):
        monte_carlo_Q(1, 5, 10, seed=1, variant="other")

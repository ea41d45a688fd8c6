import json
from fractions import Fraction

import pytest

from lattice_growth.exact_arith import DyadicInterval
from lattice_growth.theorem_suite import (
    REGISTRY,
    CheckError,
    CheckVerdict,
    aggregate,
    check_binomial_family,
    check_comparison,
    check_recursion_consistency,
    n_multiples,
    resolve_params,
    run_all,
    run_check,
    sharpness_search,
)
from lattice_growth.theorem_suite.report import margin_from_json

EXPECTED_IDS = {
    "harmonicity", "shift_identity", "laplace_power_identity", "derivative_laplacian",
    "absolute_monotonicity", "three_circles", "leading_coefficient", "coefficient_global_bound",
    "truncation_bracket", "fk_bound", "zk_bound", "moment_bound", "q_rough_bound", "vandermonde",
    "tail_estimate", "head_estimate", "model_abs_monotone", "pair_product",
}


def test_registry_covers_every_named_check():
    assert EXPECTED_IDS <= set(REGISTRY)


def test_run_check_examples():
    r = run_check("harmonicity", {"k_max": 8, "radius": 8})
    assert r.verdict is CheckVerdict.PASS and r.margin == 0
    r = run_check("moment_bound", {"k": 1, "n": 4})
    assert r.verdict is CheckVerdict.PASS and r.margin == 0
    r = run_check("coefficient_global_bound", {"k_max": 12, "B1": Fraction(1, 100)})
    assert r.verdict is CheckVerdict.FAIL
    assert {"k": 2, "j": 0, "a": Fraction(1), "slack": Fraction(-99, 100)} in r.witnesses


def test_unknown_ids_and_bad_params_raise():
    with pytest.raises(CheckError):
        run_check("no_such_check", {})
    with pytest.raises(CheckError):
        run_check("harmonicity", {"k_max": 1000})
    with pytest.raises(CheckError):
        run_check("harmonicity", {"bogus": 1})
    with pytest.raises(CheckError):
        run_check("moment_bound", {"k_min": 3, "k_max": 1})
    with pytest.raises(CheckError):
        run_check("binomial_family", {"alpha": 0.25})  # floats are not exact rationals
    with pytest.raises(CheckError):
        run_check("binomial_family", {"k": 10, "n": 2, "alpha": 0})  # nonpositive factor


def test_string_params_are_parsed():
    p = resolve_params("coefficient_global_bound", {"B1": "1/100", "k": "3"})
    assert p["B1"] == Fraction(1, 100) and p["k_min"] == p["k_max"] == 3
    p = resolve_params("model_abs_monotone", {"alphas": "0,1/2"})
    assert p["alphas"] == [0, Fraction(1, 2)]
    assert resolve_params("harmonicity", None, "quick")["k_max"] == 8


def test_recursion_consistency():
    for k in (0, 6):
        r = check_recursion_consistency(k)
        assert r.verdict is CheckVerdict.PASS and r.margin == 0
        assert r.details["instances"] == k + 1


def test_comparison_examples():
    r = check_comparison(1, [1, 2, 3, 50])
    assert r.verdict is CheckVerdict.PASS
    assert r.details["per_k"][1]["r_min"] == Fraction(4, 5)  # n/(n + 1/4) at n = 1
    r = check_comparison(0, [1, 5])
    assert r.details["per_k"][0] == {"r_min": 1, "r_max": 1}
    r = check_comparison(8, [16, 32, 32, 64, 128])
    assert r.verdict is CheckVerdict.PASS and r.margin >= 0
    assert Fraction(1, 4) <= r.details["per_k"][8]["r_min"] <= r.details["C_emp"]
    assert [w["n"] for w in r.details["reported_only"]] == [16]


def test_binomial_family_examples():
    r = check_binomial_family(Fraction(1), Fraction(1, 2), 2, 3, 2)
    assert r.verdict is CheckVerdict.FAIL and r.witnesses
    r = check_binomial_family(Fraction(1, 4), Fraction(1, 2), 1, 16, 64)
    assert r.verdict in (CheckVerdict.PASS, CheckVerdict.FAIL)
    assert isinstance(r.margin, DyadicInterval)


def test_binomial_family_product_path_agrees_with_exact_path(monkeypatch):
    from lattice_growth.theorem_suite import checks

    cases = [(30, n, C) for n in (60, 120, 400) for C in (1, 2, 3)]
    exact = [check_binomial_family(Fraction(1, 4), Fraction(1, 2), C, k, n) for k, n, C in cases]
    assert {r.details["path"] for r in exact} == {"exact"}
    monkeypatch.setattr(checks, "EXACT_K_LIMIT", 10)
    product = [check_binomial_family(Fraction(1, 4), Fraction(1, 2), C, k, n) for k, n, C in cases]
    assert {r.details["path"] for r in product} == {"factor_product"}
    assert [r.verdict for r in exact] == [r.verdict for r in product]
    assert {r.verdict for r in exact} == {CheckVerdict.PASS, CheckVerdict.FAIL}


def test_interval_verdicts_are_monotone_in_precision():
    verdicts = []
    for p in (32, 64, 128, 256):
        r = run_check("three_circles", {"k_max": 4, "n_max": 8, "precision": p, "max_precision": p})
        verdicts.append(r.verdict)
    first_pass = verdicts.index(CheckVerdict.PASS)
    assert all(v is CheckVerdict.PASS for v in verdicts[first_pass:])


def test_three_circles_grid_is_certified():
    r = run_check("three_circles", {"k_max": 8, "n_max": 16, "max_precision": 256})
    assert r.verdict is CheckVerdict.PASS and r.details["max_precision_used"] <= 256


def test_report_json_round_trip():
    for r in (run_check("recursion", {"k": 4}), run_check("three_circles", {"k_max": 2, "n_max": 3})):
        d = r.to_dict()
        assert set(d) >= {"check_id", "params", "verdict", "margin", "witnesses", "elapsed_ms", "constants_used"}
        text = json.dumps(d, sort_keys=True)
        assert json.dumps(json.loads(text), sort_keys=True) == text
        assert margin_from_json(d["margin"]) == r.margin
        assert r.to_dict(timing=False)["elapsed_ms"] is None


def test_sharpness_examples():
    r = sharpness_search(10**6, Fraction(1, 2), (0, 20), (1, 40))
    assert r.witnesses == [] and r.cells == 21 * 40
    empty = sharpness_search(1, Fraction(1, 2), (5, 3), (1, 10))
    assert empty.cells == 0 and empty.best_A is None and empty.witnesses == []
    r = sharpness_search(1, Fraction(3, 5), (40, 41), n_multiples(2, 4))
    assert r.cells == 81 + 83 and r.witnesses


def test_sharpness_witnesses_reverify_independently():
    from lattice_growth.growth_newton import coeffs_by_difference
    from lattice_growth.theorem_suite.sharpness import evaluate_cell

    r = sharpness_search(1, Fraction(3, 5), (14, 15), n_multiples(2, 4), precision=64)
    for w in r.witnesses[:5]:
        v, margin, _, _ = evaluate_cell(coeffs_by_difference(w["k"]), w["n"], Fraction(1), Fraction(3, 5), 256, 1024)
        assert v is CheckVerdict.PASS
        # both enclose the same real margin, so they must overlap
        assert margin.lo_fraction() <= w["margin"].hi_fraction() and w["margin"].lo_fraction() <= margin.hi_fraction()


def test_sharpness_parallel_matches_serial(tmp_path):
    from lattice_growth.growth_newton import CoeffCache

    a = sharpness_search(1, Fraction(3, 5), (10, 13), n_multiples(2, 4), precision=64)
    cache = CoeffCache(tmp_path / "c.csv")
    b = sharpness_search(1, Fraction(3, 5), (10, 13), n_multiples(2, 4), precision=64, cache=cache, jobs=2)
    assert a.to_dict(timing=False) == b.to_dict(timing=False)
    assert (tmp_path / "c.csv").exists() and len(CoeffCache(tmp_path / "c.csv")) == sum(k + 1 for k in range(10, 14))


def test_run_all_quick_passes_and_failures_propagate():
    reports = run_all("quick")
    assert [r.check_id for r in reports] == list(REGISTRY)
    assert aggregate(reports) is CheckVerdict.PASS, [r.summary() for r in reports if not r.passed]
    bad = run_all("quick", {"coefficient_global_bound": {"B1": "1/100"}})
    assert aggregate(bad) is CheckVerdict.FAIL
    with pytest.raises(CheckError):
        run_all("medium")
    with pytest.raises(CheckError):
        run_all("quick", {"nonexistent": {}})

"""Problem encoding: canonical form, evaluation, spectrum oracle, rescaling, generators."""

import numpy as np
import pytest

from qaoatune.errors import ResourceLimitError
from qaoatune.problems import (
    SpinPolynomial,
    SpinTerm,
    evaluate,
    gen_labs,
    gen_maxcut,
    gen_random_weighted_maxcut,
    load_problem,
    rescale,
    save_problem,
    spectrum,
    spins_of_index,
)


# ---------------------------------------------------------------------------
# canonical form
# ---------------------------------------------------------------------------

def test_term_indices_must_increase():
    with pytest.raises(ValueError):
        SpinTerm((1, 0), 1.0)
    with pytest.raises(ValueError):
        SpinTerm((0, 0), 1.0)
    with pytest.raises(ValueError):
        SpinTerm((), 1.0)


def test_duplicate_variable_sets_merge():
    poly = SpinPolynomial(2, (SpinTerm((0, 1), 1.0), SpinTerm((0, 1), 0.5)))
    assert len(poly.terms) == 1
    assert poly.terms[0].weight == 1.5


def test_merge_is_order_independent():
    terms = [SpinTerm((0,), 0.5), SpinTerm((1, 2), -1.0), SpinTerm((0,), 0.25)]
    a = SpinPolynomial(3, tuple(terms))
    b = SpinPolynomial(3, tuple(reversed(terms)))
    assert a == b


def test_zero_weight_terms_dropped():
    poly = SpinPolynomial(2, (SpinTerm((0,), 1.0), SpinTerm((0, 1), 0.0)))
    assert len(poly.terms) == 1


def test_variable_index_bound_checked():
    with pytest.raises(ValueError):
        SpinPolynomial(2, (SpinTerm((0, 2), 1.0),))


# ---------------------------------------------------------------------------
# evaluate
# ---------------------------------------------------------------------------

def test_evaluate_single_quadratic_term():
    poly = SpinPolynomial(2, (SpinTerm((0, 1), 1.0),))
    assert evaluate(poly, (+1, +1)) == 1.0
    assert evaluate(poly, (+1, -1)) == -1.0


def test_evaluate_length_mismatch():
    poly = SpinPolynomial(2, (SpinTerm((0, 1), 1.0),))
    with pytest.raises(ValueError):
        evaluate(poly, (1, 1, 1))


def _random_poly(n, n_terms, seed):
    rng = np.random.default_rng(seed)
    terms = []
    for _ in range(n_terms):
        k = int(rng.integers(1, 5))
        variables = tuple(sorted(rng.choice(n, size=min(k, n), replace=False).tolist()))
        terms.append(SpinTerm(variables, float(rng.normal())))
    return SpinPolynomial(n, tuple(terms))


def test_evaluate_matches_second_naive_loop():
    # dual implementation: re-derive the value with independent code paths
    poly = _random_poly(8, 20, seed=7)
    rng = np.random.default_rng(11)
    for _ in range(20):
        s = rng.choice([-1, 1], size=8)
        expected = 0.0
        for term in poly.terms:
            prod = 1.0
            for i in term.variables:
                prod *= s[i]
            expected += term.weight * prod
        assert evaluate(poly, s) == pytest.approx(expected, abs=1e-12)


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------

def test_spectrum_single_edge():
    poly = gen_maxcut([(0, 1, 1.0)], 2)
    spec = spectrum(poly)
    assert spec.costs.tolist() == [1.0, -1.0, -1.0, 1.0]
    assert spec.f_min == -1.0 and spec.f_max == 1.0
    assert spec.argmin_states == (1, 2)


def test_spectrum_single_linear_term():
    poly = SpinPolynomial(1, (SpinTerm((0,), 2.0),))
    assert spectrum(poly).costs.tolist() == [2.0, -2.0]


def test_labs7_minimum_matches_exhaustive_direct_formula():
    # independent brute force of the sidelobe sum over all 2^7 sequences;
    # the known table optimum for length 7 is 3
    def sidelobe(s):
        n = len(s)
        return sum(
            sum(s[i] * s[i + k] for i in range(n - k)) ** 2 for k in range(1, n)
        )

    best = min(
        sidelobe([1 - 2 * ((z >> i) & 1) for i in range(7)]) for z in range(128)
    )
    poly = gen_labs(7)
    spec = spectrum(poly)
    assert best == 3
    assert spec.f_min + poly.offset == pytest.approx(3.0, abs=1e-12)


def test_spectrum_consistent_with_evaluate():
    for poly in (gen_labs(6), _random_poly(5, 12, seed=3)):
        spec = spectrum(poly)
        for z in range(2**poly.num_variables):
            assert spec.costs[z] == pytest.approx(
                evaluate(poly, spins_of_index(z, poly.num_variables)), abs=1e-12
            )


def test_spectrum_limit(monkeypatch):
    poly = _random_poly(6, 5, seed=0)
    monkeypatch.setenv("QAOATUNE_BRUTE_FORCE_LIMIT", "5")
    with pytest.raises(ResourceLimitError):
        spectrum(poly)


# ---------------------------------------------------------------------------
# rescale
# ---------------------------------------------------------------------------

def test_rescale_unweighted_maxcut_factor_one():
    poly = gen_maxcut([(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)], 3)
    scaled, factor = rescale(poly)
    assert factor == 1.0
    assert scaled == poly


def test_rescale_uniform_weight_two():
    poly = SpinPolynomial(3, (SpinTerm((0, 1), 2.0), SpinTerm((1, 2), 2.0)))
    scaled, factor = rescale(poly)
    assert factor == pytest.approx(2.0, abs=1e-12)
    assert all(t.weight == pytest.approx(1.0, abs=1e-12) for t in scaled.terms)


def test_rescale_mixed_order():
    poly = SpinPolynomial(2, (SpinTerm((0,), 3.0), SpinTerm((0, 1), 4.0)))
    _, factor = rescale(poly)
    assert factor == pytest.approx(5.0, abs=1e-12)


def test_rescale_linearity_and_argmin_invariance():
    poly = _random_poly(6, 10, seed=5)
    scaled, factor = rescale(poly)
    rng = np.random.default_rng(0)
    for _ in range(10):
        s = rng.choice([-1, 1], size=6)
        orig = evaluate(poly, s)
        assert evaluate(scaled, s) * factor == pytest.approx(
            orig, rel=1e-12, abs=1e-12
        )
    assert spectrum(scaled).argmin_states == spectrum(poly).argmin_states


def test_rescale_rejects_all_zero():
    with pytest.raises(ValueError):
        rescale(SpinPolynomial(2, ()))


def test_rescale_leaves_original_untouched():
    poly = SpinPolynomial(2, (SpinTerm((0, 1), 2.0),))
    rescale(poly)
    assert poly.terms[0].weight == 2.0


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def test_gen_maxcut_single_edge():
    poly = gen_maxcut([(0, 1, 1.0)], 2)
    assert poly.terms == (SpinTerm((0, 1), 1.0),)


def test_gen_maxcut_triangle_minimum():
    poly = gen_maxcut([(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)], 3)
    assert len(poly.terms) == 3
    assert spectrum(poly).f_min == -1.0  # best 2-1 split cuts two of three edges


def test_gen_maxcut_merges_parallel_edges():
    poly = gen_maxcut([(0, 1, 1.0), (1, 0, 1.0)], 2)
    assert poly.terms == (SpinTerm((0, 1), 2.0),)


def test_gen_maxcut_rejects_self_loop():
    with pytest.raises(ValueError):
        gen_maxcut([(1, 1, 1.0)], 2)


def test_gen_labs_matches_direct_formula_n3():
    poly = gen_labs(3)
    for z in range(8):
        s = [1 - 2 * ((z >> i) & 1) for i in range(3)]
        direct = sum(
            sum(s[i] * s[i + k] for i in range(3 - k)) ** 2 for k in range(1, 3)
        )
        assert evaluate(poly, s) + poly.offset == pytest.approx(direct, abs=1e-12)


def test_gen_labs_symmetries():
    poly = gen_labs(10)
    rng = np.random.default_rng(2)
    for _ in range(5):
        s = rng.choice([-1, 1], size=10)
        assert evaluate(poly, s) == pytest.approx(evaluate(poly, -s), abs=1e-12)
        assert evaluate(poly, s) == pytest.approx(evaluate(poly, s[::-1]), abs=1e-12)


def test_gen_labs_rejects_tiny():
    with pytest.raises(ValueError):
        gen_labs(2)


def test_gen_regular_k4():
    poly = gen_random_weighted_maxcut(4, 3, "uniform01", seed=0)
    assert {t.variables for t in poly.terms} == {
        (0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)
    }


def test_gen_regular_deterministic():
    a = gen_random_weighted_maxcut(10, 3, "gauss01", seed=42)
    b = gen_random_weighted_maxcut(10, 3, "gauss01", seed=42)
    assert a == b


def test_gen_regular_degrees_exact():
    for seed in range(8):
        poly = gen_random_weighted_maxcut(12, 3, "uniform01", seed=seed)
        degree = np.zeros(12, dtype=int)
        for term in poly.terms:
            for i in term.variables:
                degree[i] += 1
        assert degree.tolist() == [3] * 12


def test_gen_regular_infeasible():
    with pytest.raises(ValueError):
        gen_random_weighted_maxcut(5, 3, "uniform01", seed=0)  # odd stub count
    with pytest.raises(ValueError):
        gen_random_weighted_maxcut(4, 4, "uniform01", seed=0)  # degree >= n
    with pytest.raises(ValueError):
        gen_random_weighted_maxcut(4, 3, "exp", seed=0)


# ---------------------------------------------------------------------------
# file round trip
# ---------------------------------------------------------------------------

def test_problem_file_round_trip(tmp_path):
    poly = gen_random_weighted_maxcut(8, 3, "gauss01", seed=9)
    path = tmp_path / "instance.json"
    save_problem(poly, path)
    assert load_problem(path) == poly


def test_labs_file_round_trip_keeps_offset(tmp_path):
    poly = gen_labs(8)
    path = tmp_path / "labs.json"
    save_problem(poly, path)
    assert load_problem(path).offset == poly.offset

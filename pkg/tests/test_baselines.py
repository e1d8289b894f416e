from fractions import Fraction

import pytest

from conftest import make_bistar, make_quasistar
from core.arrangement import enumerate_arrangements, sum_edge_lengths
from core.baselines import (
    compute_baselines,
    d_max_balanced_bistar,
    d_max_bistar,
    d_max_k_quasistar,
    d_max_linear,
    d_max_one_regular,
    d_max_search,
    d_max_star,
    d_min_bistar,
    d_min_closed,
    d_min_exact,
    expected_D_rla,
    variance_D_rla,
)
from core.errors import BadArgs, Degenerate, TooLarge, UnsupportedClass
from core.tree import build_tree, classify, generate_free_trees


def test_random_baseline_values():
    assert expected_D_rla(6) == Fraction(35, 3)
    assert expected_D_rla(7) == 16


def test_variance_small_cases(path4):
    star3 = build_tree(3, [(0, 1), (0, 2)])
    assert variance_D_rla(star3) == Fraction(2, 9)
    assert variance_D_rla(path4) == 1
    assert variance_D_rla(build_tree(2, [(0, 1)])) == 0
    with pytest.raises(Degenerate):
        variance_D_rla(build_tree(1, []))


def test_closed_form_minima():
    assert d_min_closed("Linear", 6) == 5
    assert d_min_closed("Star", 5) == 6
    assert d_min_closed("Star", 4) == 4
    with pytest.raises(UnsupportedClass):
        d_min_closed("Caterpillar", 6)


def test_d_min_exact_on_hub_tree(hub_tree):
    d_min, arrangement = d_min_exact(hub_tree)
    assert d_min == 8
    assert sum_edge_lengths(hub_tree, arrangement) == 8


def test_path_maximum():
    assert d_max_linear(4) == 7
    assert d_max_linear(5) == 11
    t = build_tree(6, [(i, i + 1) for i in range(5)])
    assert d_max_search(t)[0] == d_max_linear(6) == 17


def test_bistar_at_24_vertices():
    assert d_min_bistar(24, 13) == 84
    assert d_max_bistar(24, 13) == 396
    # the balanced split 12/12 reaches one more than the optimal k1 = 13 bistar
    assert d_max_balanced_bistar(24) == d_max_bistar(24, 12) == 397


def test_star_maximum():
    assert d_max_star(4, 5) == 10
    assert d_max_star(1, 2) == 1
    assert d_max_star(4, 7) == 18
    with pytest.raises(BadArgs):
        d_max_star(5, 5)


def test_one_regular_maximum():
    assert d_max_one_regular(2, 5) == 6
    assert d_max_one_regular(1, 2) == 1
    assert d_max_one_regular(2, 6) == 8
    with pytest.raises(BadArgs):
        d_max_one_regular(3, 5)


def test_balanced_bistar_maximum(path4):
    assert d_max_balanced_bistar(2) == 1
    assert d_max_balanced_bistar(4) == 7 == enumerate_arrangements(path4).maximum
    with pytest.raises(BadArgs):
        d_max_balanced_bistar(1)


@pytest.mark.parametrize("n", range(3, 9))
def test_balanced_bistar_bounds_every_maximum(n):
    ceiling = d_max_balanced_bistar(n)
    for t in generate_free_trees(n):
        b = compute_baselines(t, with_d_max=True)
        assert n - 1 <= b.d_min <= n * n // 4 <= b.d_rla <= b.d_max <= ceiling


def test_bistar_argument_checks():
    with pytest.raises(BadArgs):
        d_min_bistar(10, 4)
    with pytest.raises(BadArgs):
        d_max_bistar(10, 10)


@pytest.mark.parametrize("n", range(3, 11))
def test_bistar_formulas_match_solvers(n):
    for k1 in range((n + 1) // 2, n):
        t = make_bistar(n, k1)
        assert d_min_exact(t)[0] == d_min_bistar(n, k1)
        assert d_max_search(t)[0] == d_max_bistar(n, k1)


QUASISTAR_SHAPES = [(n, k) for n in range(3, 11) for k in range((n - 1) // 2 + 1)]


def _quasistar_params(n_values):
    return [(n, k) for n, k in QUASISTAR_SHAPES if n in n_values]


@pytest.mark.parametrize("n, k", _quasistar_params(range(3, 9)))
def test_quasistar_maximum_matches_enumeration(n, k):
    t = make_quasistar(k, n - 1 - 2 * k)
    assert d_max_k_quasistar(n, k) == enumerate_arrangements(t).maximum


@pytest.mark.slow
@pytest.mark.parametrize("n, k", _quasistar_params(range(9, 11)))
def test_quasistar_maximum_matches_enumeration_larger(n, k):
    t = make_quasistar(k, n - 1 - 2 * k)
    assert d_max_k_quasistar(n, k) == enumerate_arrangements(t).maximum


@pytest.mark.parametrize("n, k", QUASISTAR_SHAPES)
def test_quasistar_maximum_splits_into_star_and_matching(n, k):
    # hub star over all n positions plus k independent edges over the other n - 1
    star_part = d_max_star(n - 1 - k, n)
    matching_part = d_max_one_regular(k, n - 1)
    assert d_max_k_quasistar(n, k) == star_part + matching_part == (n - 1 - k) * (3 * k + n) // 2


def test_quasistar_examples():
    assert d_max_k_quasistar(5, 0) == d_max_star(4, 5) == 10
    assert d_max_k_quasistar(7, 2) == 18 + 8
    assert d_max_k_quasistar(9, 1) == 42
    with pytest.raises(BadArgs):
        d_max_k_quasistar(6, 3)


def test_d_max_search_witness(hub_tree):
    d_max, arrangement = d_max_search(hub_tree)
    assert d_max == 26
    assert sum_edge_lengths(hub_tree, arrangement) == 26


def test_d_max_search_binomial_bound_agrees(hub_tree):
    assert d_max_search(hub_tree, bound="binomial")[0] == d_max_search(hub_tree, bound="rla")[0]


def test_d_max_search_cap():
    t = build_tree(16, [(i, i + 1) for i in range(15)])
    with pytest.raises(TooLarge):
        d_max_search(t, cap=14)


def test_compute_baselines_provenance(hub_tree, star5):
    bundle = compute_baselines(hub_tree, with_d_max=True)
    assert bundle.d_min == 8
    assert bundle.d_max == 26
    assert bundle.provenance["d_min"] == "Solver"
    assert bundle.provenance["d_max"] == "ClosedForm(KQuasistar)"
    star = compute_baselines(star5)
    assert star.d_max is None
    assert star.provenance["d_min"] == "ClosedForm(Star)"


def _check_against_enumeration(t):
    dist = enumerate_arrangements(t)
    bundle = compute_baselines(t, with_d_max=True)
    assert bundle.d_min == dist.minimum, classify(t)
    assert d_min_exact(t)[0] == dist.minimum
    assert bundle.d_max == dist.maximum, classify(t)
    assert bundle.d_rla == dist.mean
    assert bundle.v_rla == dist.variance


@pytest.mark.parametrize("n", range(3, 9))
def test_baselines_match_enumeration(n):
    for t in generate_free_trees(n):
        _check_against_enumeration(t)


@pytest.mark.slow
def test_baselines_match_enumeration_nine_vertices():
    for t in generate_free_trees(9):
        _check_against_enumeration(t)


@pytest.mark.slow
@pytest.mark.parametrize("n", [10, 11, 12])
def test_d_min_witness_attains_minimum_on_larger_trees(n):
    # every tree's solver minimum is attained by its witness and never beats n - 1
    for t in generate_free_trees(n):
        d_min, arrangement = d_min_exact(t)
        assert sum_edge_lengths(t, arrangement) == d_min
        assert d_min >= n - 1

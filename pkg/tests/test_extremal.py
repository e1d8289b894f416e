from fractions import Fraction

import pytest

from core.arrangement import enumerate_arrangements, sum_edge_lengths
from core.baselines import d_max_bistar, expected_D_rla
from core.errors import CapExceeded, UndefinedForShort
from core.extremal import (
    alpha_bistar,
    alpha_exact,
    omega_min_linear,
    omega_min_tree,
    z1_lower_bound,
)
from core.tree import build_tree, classify, generate_free_trees


def test_three_vertices_meet_the_lower_bound():
    report = alpha_exact(3)
    assert report.alpha == Fraction(-1, 2)
    assert report.z1 == Fraction(-1, 2)
    assert report.ansatz_holds


def test_bistar_minimum_at_24_vertices():
    assert alpha_bistar(24) == (Fraction(-613, 323), 13)


def test_bistar_minimum_tends_to_minus_two():
    value, _ = alpha_bistar(10_000)
    assert abs(float(value) + 2) < 1e-2


def test_bistar_witness_attains_the_maximum():
    report = alpha_exact(6)
    assert report.witness_class == "Bistar"
    assert classify(report.witness).k1 == report.k1
    d = sum_edge_lengths(report.witness, report.witness_arrangement)
    assert d == d_max_bistar(6, report.k1)


def test_z1_bound_values():
    assert z1_lower_bound(4) == Fraction(-12, 6)
    assert float(z1_lower_bound(10_001)) == pytest.approx(-5, abs=1e-2)


def test_linear_omega_min():
    # path of 4: D_rla = 5, D_max = 7, D_min = 3
    assert omega_min_linear(4) == -1


def _brute_alpha(n):
    d_rla = expected_D_rla(n)
    best = None
    for t in generate_free_trees(n):
        dist = enumerate_arrangements(t)
        value = (d_rla - dist.maximum) / (d_rla - dist.minimum)
        best = value if best is None else min(best, value)
    return best


def _min_over_trees(n):
    return min(omega_min_tree(t) for t in generate_free_trees(n))


@pytest.mark.parametrize("n", range(3, 8))
def test_alpha_matches_brute_force(n):
    assert alpha_exact(n).alpha == _brute_alpha(n)


@pytest.mark.parametrize("n", range(3, 9))
def test_alpha_is_the_minimum_over_all_trees(n):
    assert alpha_exact(n, prune=False).alpha == _min_over_trees(n)


@pytest.mark.slow
@pytest.mark.parametrize("n", [9, 10])
def test_alpha_is_the_minimum_over_all_trees_larger(n):
    assert alpha_exact(n, prune=False).alpha == _min_over_trees(n)


@pytest.mark.parametrize("n", range(3, 10))
def test_alpha_between_bounds(n):
    report = alpha_exact(n)
    assert report.z1 <= report.alpha <= report.alpha_bistar
    assert report.witness_class == "Bistar"
    assert report.ansatz_holds


@pytest.mark.slow
@pytest.mark.parametrize("n", [10, 11, 12])
def test_alpha_between_bounds_larger(n):
    report = alpha_exact(n)
    assert report.z1 <= report.alpha <= report.alpha_bistar
    assert report.witness_class == "Bistar"
    assert report.ansatz_holds


def _check_tree_bounds(n):
    z1 = z1_lower_bound(n)
    for t in generate_free_trees(n):
        value = omega_min_tree(t)
        assert value >= z1
        assert value >= -5


@pytest.mark.parametrize("n", range(3, 10))
def test_every_tree_respects_the_lower_bounds(n):
    _check_tree_bounds(n)


@pytest.mark.slow
@pytest.mark.parametrize("n", [10, 11, 12])
def test_every_tree_respects_the_lower_bounds_larger(n):
    _check_tree_bounds(n)


@pytest.mark.parametrize("n", range(3, 9))
def test_pruning_does_not_change_alpha(n):
    pruned = alpha_exact(n, prune=True)
    full = alpha_exact(n, prune=False)
    assert pruned.alpha == full.alpha
    assert full.trees_pruned == 0


@pytest.mark.slow
@pytest.mark.parametrize("n", [9, 10])
def test_pruning_does_not_change_alpha_larger(n):
    assert alpha_exact(n, prune=True).alpha == alpha_exact(n, prune=False).alpha


def test_paths_never_beat_the_best_bistar():
    for n in range(3, 201):
        assert alpha_bistar(n)[0] <= omega_min_linear(n)


def test_omega_min_tree_matches_enumeration(hub_tree, path4):
    for t in (hub_tree, path4):
        dist = enumerate_arrangements(t)
        expected = (dist.mean - dist.maximum) / (dist.mean - dist.minimum)
        assert omega_min_tree(t) == expected


def test_alpha_errors():
    with pytest.raises(CapExceeded):
        alpha_exact(13, cap=12)
    with pytest.raises(UndefinedForShort):
        alpha_exact(2)
    with pytest.raises(UndefinedForShort):
        omega_min_tree(build_tree(2, [(0, 1)]))

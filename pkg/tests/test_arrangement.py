from fractions import Fraction
from math import factorial

import numpy as np
import pytest

from core.arrangement import (
    LinearArrangement,
    enumerate_arrangements,
    random_positions,
    shuffle_arrangement,
    spawn_generators,
    sum_edge_lengths,
)
from core.baselines import expected_D_rla, variance_D_rla
from core.errors import BadArgs, SizeMismatch, TooLarge
from core.tree import build_tree


def test_linear_arrangement_validates_permutation():
    with pytest.raises(BadArgs):
        LinearArrangement((1, 1, 3))


def test_order_and_reverse():
    a = LinearArrangement.from_order([2, 0, 1])
    assert a.positions == (2, 3, 1)
    assert a.order() == [2, 0, 1]
    assert a.reverse().order() == [1, 0, 2]


def test_sum_edge_lengths(hub_tree, hub_order):
    assert sum_edge_lengths(hub_tree, hub_order) == 10
    assert hub_order.root_position(hub_tree) == 3


def test_sum_edge_lengths_size_mismatch(hub_tree):
    with pytest.raises(SizeMismatch):
        sum_edge_lengths(hub_tree, LinearArrangement.identity(6))


def test_shuffle_is_a_permutation(rng):
    a = shuffle_arrangement(9, rng)
    assert sorted(a.positions) == list(range(1, 10))


def test_random_positions_rows_are_permutations(rng):
    rows = random_positions(6, 50, rng)
    assert rows.shape == (50, 6)
    assert (np.sort(rows, axis=1) == np.arange(6)).all()


def test_spawned_streams_are_reproducible():
    first = [g.integers(0, 1000, size=5).tolist() for g in spawn_generators(7, 3)]
    second = [g.integers(0, 1000, size=5).tolist() for g in spawn_generators(7, 3)]
    other_key = [g.integers(0, 1000, size=5).tolist() for g in spawn_generators(7, 3, key=1)]
    assert first == second
    assert first != other_key
    assert first[0] != first[1]


def test_enumeration_of_three_vertex_star():
    t = build_tree(3, [(0, 1), (0, 2)])
    dist = enumerate_arrangements(t)
    assert dist.counts == {2: 2, 3: 4}
    assert dist.mean == Fraction(8, 3)
    assert dist.variance == Fraction(2, 9)


def test_enumeration_of_path(path4):
    dist = enumerate_arrangements(path4)
    assert dist.total == factorial(4)
    assert dist.minimum == 3
    assert dist.maximum == 7
    assert dist.variance == 1
    assert sum_edge_lengths(path4, dist.argmin) == 3
    assert sum_edge_lengths(path4, dist.argmax) == 7


def test_enumeration_moments_match_closed_forms(hub_tree):
    dist = enumerate_arrangements(hub_tree)
    assert dist.mean == expected_D_rla(7)
    assert dist.variance == variance_D_rla(hub_tree) == Fraction(152, 15)


def test_enumeration_cap():
    t = build_tree(11, [(0, v) for v in range(1, 11)])
    with pytest.raises(TooLarge):
        enumerate_arrangements(t)


def test_distribution_to_dict(path4):
    data = enumerate_arrangements(path4).to_dict()
    assert data["min"] == 3 and data["max"] == 7
    assert data["mean"] == "5"

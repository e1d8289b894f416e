import math
from fractions import Fraction

import numpy as np
import pandas as pd
import pytest

from core.arrangement import (
    LinearArrangement,
    enumerate_arrangements,
    make_rng,
    random_positions,
    shuffle_arrangement,
    sum_edge_lengths,
)
from core.baselines import compute_baselines, d_min_exact
from core.errors import BadRoot, EmptyCorpus, UndefinedForShort, ZeroVariance
from core.scores import (
    aggregate,
    aggregate_frame,
    blend_short_sentences,
    d_z,
    delta,
    expected_delta_bounds,
    expected_gamma_bounds,
    expected_ndd_approx,
    family_rollup,
    gamma,
    ndd,
    omega,
    omega_all_lengths,
    score_bounds_table,
    score_sentence,
)
from core.tree import build_tree, random_tree


def test_hub_tree_scores(hub_tree, hub_order):
    b = compute_baselines(hub_tree)
    record = score_sentence(hub_tree, hub_order, b, sentence_id="s1", language="xx")
    assert record.D == 10
    assert record.Omega == Fraction(3, 4)
    assert record.Gamma == Fraction(5, 4)
    assert record.Delta == 2
    assert record.d_bar == Fraction(10, 6)
    assert record.D0 == 4
    assert record.Dz == pytest.approx(-6 / math.sqrt(152 / 15))
    assert record.NDD == pytest.approx(abs(math.log((10 / 6) / math.sqrt(3 * 7))))


def test_scores_at_the_minimum(hub_tree):
    b = compute_baselines(hub_tree)
    _, arrangement = d_min_exact(hub_tree)
    record = score_sentence(hub_tree, arrangement, b)
    assert record.Omega == 1
    assert record.Gamma == 1
    assert record.Delta == 0


@pytest.mark.slow
def test_scores_at_the_minimum_of_random_trees():
    rng = make_rng(2024)
    for _ in range(200):
        t = random_tree(int(rng.integers(3, 51)), rng)
        _, arrangement = d_min_exact(t)
        record = score_sentence(t, arrangement, compute_baselines(t))
        assert (record.Omega, record.Gamma, record.Delta) == (1, 1, 0)


@pytest.mark.slow
def test_omega_and_dz_are_stable_under_many_shuffles():
    rng = make_rng(7)
    shuffles = 100_000
    for _ in range(20):
        t = random_tree(int(rng.integers(3, 31)), rng)
        b = compute_baselines(t)
        us = np.array([u for u, _ in t.edges])
        vs = np.array([v for _, v in t.edges])
        positions = random_positions(t.n, shuffles, rng)
        d = np.abs(positions[:, us] - positions[:, vs]).sum(axis=1).astype(float)
        omegas = (float(b.d_rla) - d) / float(b.d_rla - b.d_min)
        zs = (d - float(b.d_rla)) / math.sqrt(b.v_rla)
        for values in (omegas, zs):
            standard_error = values.std(ddof=1) / math.sqrt(shuffles)
            assert abs(values.mean()) < 4 * standard_error


def test_short_sentences_leave_scores_absent():
    t = build_tree(2, [(0, 1)], root=0)
    record = score_sentence(t, LinearArrangement.identity(2), compute_baselines(t))
    assert record.Omega is None and record.Dz is None
    assert record.Gamma == 1
    one = build_tree(1, [], root=0)
    record = score_sentence(one, LinearArrangement.identity(1), compute_baselines(one))
    assert record.Omega is None and record.Gamma is None and record.NDD is None


def test_score_errors():
    with pytest.raises(UndefinedForShort):
        omega(1, Fraction(1), 1)
    with pytest.raises(ZeroVariance):
        d_z(1, 1, 0)
    with pytest.raises(BadRoot):
        ndd(5, 4, 0)


def test_ndd_without_root_is_absent(path4):
    unrooted = build_tree(4, list(path4.edges))
    record = score_sentence(unrooted, LinearArrangement.identity(4), compute_baselines(unrooted))
    assert record.NDD is None
    assert record.Omega is not None


@pytest.mark.parametrize("a, b", [(2, -5), (2, 7), (Fraction(1, 3), -5), (Fraction(1, 3), 7)])
def test_invariance_under_affine_maps(a, b):
    rng = make_rng(3)
    for _ in range(100):
        d_min = int(rng.integers(6, 50))
        d_rla = Fraction(int(rng.integers(d_min + 1, 200)), 3) + d_min
        d = int(rng.integers(d_min, 300))
        v = Fraction(int(rng.integers(1, 100)), 7)
        assert omega(a * d + b, a * d_rla + b, a * d_min + b) == omega(d, d_rla, d_min)
        assert d_z(a * d + b, a * d_rla + b, a * a * v) == pytest.approx(d_z(d, d_rla, v), abs=1e-12)
        assert delta(d + b, d_min + b) == delta(d, d_min)
        assert gamma(a * d, a * d_min) == gamma(d, d_min)
        if d != d_min:
            assert delta(a * d, a * d_min) != delta(d, d_min)
            assert gamma(d + b, d_min + b) != gamma(d, d_min)


def test_delta_and_gamma_are_not_fully_affine_invariant():
    assert delta(2 * 10, 2 * 8) == 4 != delta(10, 8)
    assert delta(Fraction(10, 3), Fraction(8, 3)) == Fraction(2, 3)
    assert gamma(10 + 7, 8 + 7) == Fraction(17, 15) != gamma(10, 8)


def test_omega_and_dz_average_to_zero_under_shuffling():
    rng = make_rng(99)
    shuffles = 5000
    for _ in range(5):
        t = random_tree(int(rng.integers(5, 30)), rng)
        b = compute_baselines(t)
        omegas, zs = [], []
        for _ in range(shuffles):
            d = sum_edge_lengths(t, shuffle_arrangement(t.n, rng))
            omegas.append(float(omega(d, b.d_rla, b.d_min)))
            zs.append(d_z(d, b.d_rla, b.v_rla))
        for values in (np.array(omegas), np.array(zs)):
            standard_error = values.std(ddof=1) / math.sqrt(shuffles)
            assert abs(values.mean()) < 4 * standard_error


def test_expected_ndd_approximation():
    assert expected_ndd_approx(1) == pytest.approx(-math.log(2 * math.sqrt(2) / 3))
    assert expected_ndd_approx(1) == pytest.approx(0.0589, abs=1e-4)
    assert expected_ndd_approx(10**9) == pytest.approx(math.log(3 / math.sqrt(2)), abs=1e-8)
    values = [expected_ndd_approx(n) for n in range(1, 101)]
    assert all(earlier < later for earlier, later in zip(values, values[1:]))


def test_expected_gamma_and_delta_bounds(path4):
    assert expected_gamma_bounds(5)[1] == 2
    assert expected_delta_bounds(5)[1] == 4
    assert expected_delta_bounds(4)[0] == 1
    # star and path of n vertices attain the low and high ends
    star4 = build_tree(4, [(0, 1), (0, 2), (0, 3)])
    path5 = build_tree(5, [(i, i + 1) for i in range(4)])
    star_dist, path_dist = enumerate_arrangements(star4), enumerate_arrangements(path5)
    assert star_dist.mean - star_dist.minimum == expected_delta_bounds(4)[0]
    assert star_dist.mean / star_dist.minimum == expected_gamma_bounds(4)[0]
    assert path_dist.mean / path_dist.minimum == expected_gamma_bounds(5)[1]
    assert path_dist.mean - path_dist.minimum == expected_delta_bounds(5)[1]


def test_bounds_table():
    row = score_bounds_table(10)
    assert row["E_Gamma_linear"] == pytest.approx(11 / 3)
    assert row["E_Delta_linear"] == pytest.approx(24)
    assert row["E_Gamma_star"] <= row["E_Gamma_linear"]


def _records(hub_tree, path4):
    star3 = build_tree(3, [(0, 1), (0, 2)], root=0)
    out = []
    for language, t, order in [
        ("aa", hub_tree, list(range(7))),
        ("aa", star3, [1, 0, 2]),
        ("bb", path4, [0, 1, 2, 3]),
        ("bb", path4, [1, 3, 0, 2]),
    ]:
        out.append(score_sentence(t, LinearArrangement.from_order(order), compute_baselines(t), language=language))
    return out


def test_aggregate_by_language(hub_tree, path4):
    rows = aggregate(_records(hub_tree, path4))
    by_language = {row.language: row for row in rows}
    assert by_language["aa"].count == 2
    assert by_language["aa"].means["Omega"] == pytest.approx((0.75 + 1.0) / 2)
    # path of 4: Omega 1 at D = 3, -1 at D = 7
    assert by_language["bb"].means["Omega"] == pytest.approx(0.0)


def test_aggregate_by_length(hub_tree, path4):
    frame = aggregate_frame(aggregate(_records(hub_tree, path4), group_by="language_n"))
    assert list(frame.columns[:3]) == ["language", "n", "count"]
    assert frame[(frame.language == "bb") & (frame.n == 4)]["count"].iloc[0] == 2


def test_aggregate_empty():
    with pytest.raises(EmptyCorpus):
        aggregate([])


def test_family_rollup():
    table = pd.DataFrame({
        "language": ["a", "b", "c"],
        "family": ["F1", "F1", "F2"],
        "mean_Omega": [0.2, 0.4, 0.9],
    })
    rollup = family_rollup(table).set_index("family")
    assert rollup.loc["F1", "mean"] == pytest.approx(0.3)
    assert rollup.loc["F1", "languages"] == 2
    assert rollup.loc["All", "max"] == pytest.approx(0.9)
    assert rollup.loc["All", "median"] == pytest.approx(0.4)


def test_blend_short_sentences():
    assert blend_short_sentences(0.5, 10, 1, 1, 0.0, 0.0) == pytest.approx(0.4)
    assert blend_short_sentences(0.0, 2, 1, 1, 1.0, 1.0) == pytest.approx(1.0)


def test_omega_all_lengths(hub_tree, path4):
    records = _records(hub_tree, path4)
    one = build_tree(1, [], root=0)
    records.append(score_sentence(one, LinearArrangement.identity(1), compute_baselines(one), language="aa"))
    mean_long = (0.75 + 1.0 + 1.0 - 1.0) / 4
    assert omega_all_lengths(records, gamma1=1.0, gamma2=0.0) == pytest.approx((4 / 5) * mean_long + 1 / 5)

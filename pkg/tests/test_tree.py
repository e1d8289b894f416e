import pytest

from conftest import make_bistar, make_quasistar
from core.errors import (
    BadArgs,
    CapExceeded,
    CycleDetected,
    DuplicateEdge,
    NotConnected,
    VertexOutOfRange,
    WrongEdgeCount,
)
from core.tree import (
    build_tree,
    canonical_form,
    centroids,
    classify,
    degree_second_moment,
    from_head_vector,
    generate_free_trees,
    random_tree,
    to_head_vector,
)


def test_build_tree_normalizes_edges():
    t = build_tree(3, [(2, 1), (1, 0)])
    assert t.edges == ((0, 1), (1, 2))
    assert t.degrees == (1, 2, 1)
    assert t.leaves() == [0, 2]


@pytest.mark.parametrize("n, edges, error", [
    (3, [(0, 1)], WrongEdgeCount),
    (3, [(0, 1), (1, 3)], VertexOutOfRange),
    (3, [(0, 1), (1, 1)], CycleDetected),
    (3, [(0, 1), (1, 0)], DuplicateEdge),
    (4, [(0, 1), (1, 2), (2, 0)], NotConnected),
])
def test_build_tree_rejects_non_trees(n, edges, error):
    with pytest.raises(error):
        build_tree(n, edges)


def test_build_tree_rejects_bad_root():
    with pytest.raises(VertexOutOfRange):
        build_tree(2, [(0, 1)], root=5)


def test_single_vertex_tree():
    t = build_tree(1, [])
    assert t.n == 1 and t.edges == ()


def test_head_vector_round_trip():
    t = from_head_vector([2, 0, 2])
    assert t.root == 1
    assert t.edges == ((0, 1), (1, 2))
    assert to_head_vector(t) == [2, 0, 2]


def test_random_tree_is_valid(rng):
    for n in (1, 2, 5, 17):
        t = random_tree(n, rng, with_root=True)
        assert t.n == n and len(t.edges) == n - 1
        assert 0 <= t.root < n


def test_degree_second_moment(star5):
    # degrees 4,1,1,1,1
    assert degree_second_moment(star5) == pytest.approx(20 / 5)


def test_canonical_form_identifies_isomorphic_trees():
    a = build_tree(5, [(0, 1), (1, 2), (2, 3), (2, 4)])
    b = build_tree(5, [(4, 3), (3, 0), (0, 1), (0, 2)])
    c = build_tree(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
    assert canonical_form(a) == canonical_form(b)
    assert canonical_form(a) != canonical_form(c)


def test_centroids_of_paths():
    assert centroids(build_tree(5, [(0, 1), (1, 2), (2, 3), (3, 4)])) == [2]
    assert sorted(centroids(build_tree(4, [(0, 1), (1, 2), (2, 3)]))) == [1, 2]


def test_classify_families(star5, path4, hub_tree):
    assert classify(star5).tag == "Star"
    assert classify(path4).tag == "Linear"
    bistar = classify(make_bistar(8, 5))
    assert bistar.tag == "Bistar" and bistar.k1 == 5
    quasi = classify(hub_tree)
    assert quasi.tag == "KQuasistar"
    assert (quasi.k, quasi.l) == (2, 2)
    assert "Caterpillar" in quasi.tags


def test_three_vertex_path_is_reported_as_star():
    cls = classify(build_tree(3, [(0, 1), (1, 2)]))
    assert cls.tag == "Star"
    assert "Linear" in cls.tags


def test_classify_balanced_bistar():
    # hubs 0 and 1, each with two leaves
    t = build_tree(6, [(0, 1), (0, 2), (0, 3), (1, 4), (1, 5)])
    cls = classify(t)
    assert cls.tag == "Bistar"
    assert cls.k1 == 3


def test_classify_general_tree():
    # spider with three arms of length 2 around a hub, plus a leaf on one arm end
    t = build_tree(9, [(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6), (6, 7), (2, 8)])
    assert classify(t).tag == "General"


def test_quasistar_builder_matches_classification():
    cls = classify(make_quasistar(3, 1))
    assert cls.tag == "KQuasistar" and cls.k == 3 and cls.l == 1


@pytest.mark.parametrize("n, count", [(1, 1), (2, 1), (3, 1), (4, 2), (5, 3), (6, 6), (7, 11), (8, 23), (9, 47), (10, 106)])
def test_free_tree_counts(n, count):
    trees = list(generate_free_trees(n))
    assert len(trees) == count
    assert len({canonical_form(t) for t in trees}) == count


def test_free_tree_cap():
    with pytest.raises(CapExceeded):
        list(generate_free_trees(25, cap=20))


@pytest.mark.parametrize("n", [0, -3])
def test_free_trees_need_a_vertex(n):
    with pytest.raises(BadArgs):
        generate_free_trees(n)

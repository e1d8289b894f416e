from pathlib import Path

import pytest

from core.arrangement import LinearArrangement, make_rng
from core.tree import build_tree

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def hub_tree():
    """
    Seven vertices: a hub with four neighbours, two of which carry one more leaf.

    Numbered by word order a e h c d b f, so the identity arrangement has D = 10.
    """
    a, e, h, c, d, b, f = range(7)
    edges = [(h, a), (h, b), (h, c), (h, d), (a, e), (b, f)]
    return build_tree(7, edges, root=h)


@pytest.fixture
def hub_order():
    return LinearArrangement.identity(7)


@pytest.fixture
def star5():
    return build_tree(5, [(0, 1), (0, 2), (0, 3), (0, 4)], root=0)


@pytest.fixture
def path4():
    return build_tree(4, [(0, 1), (1, 2), (2, 3)], root=0)


@pytest.fixture
def rng():
    return make_rng(12345)


def make_bistar(n, k1):
    """Hubs 0 and 1 with degrees k1 and n - k1."""
    edges = [(0, 1)]
    edges += [(0, v) for v in range(2, k1 + 1)]
    edges += [(1, v) for v in range(k1 + 1, n)]
    return build_tree(n, edges)


def make_quasistar(k, l):
    """Hub 0 with k two-edge arms and l leaves."""
    edges = []
    next_vertex = 1
    for _ in range(k):
        edges += [(0, next_vertex), (next_vertex, next_vertex + 1)]
        next_vertex += 2
    for _ in range(l):
        edges.append((0, next_vertex))
        next_vertex += 1
    return build_tree(next_vertex, edges)

# Omega Engine - Free Trees
# Unrooted trees: validation, degree statistics, family detection, canonical codes, enumeration

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import List, Tuple, Optional, Iterator, Sequence, Dict

import networkx as nx
import numpy as np

from config import FREE_TREE_CAP
from core.errors import (
    BadArgs,
    CapExceeded,
    CycleDetected,
    DuplicateEdge,
    NotConnected,
    VertexOutOfRange,
    WrongEdgeCount,
)

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]


@dataclass(frozen=True)
class FreeTree:
    """
    An unrooted tree on vertices 0..n-1.

    Build instances through build_tree(); the constructor itself does not validate.
    The optional root is the syntactic root and only matters for NDD.
    """

    n: int
    edges: Tuple[Edge, ...]
    root: Optional[int] = None

    @cached_property
    def adjacency(self) -> Tuple[Tuple[int, ...], ...]:
        neighbours: List[List[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            neighbours[u].append(v)
            neighbours[v].append(u)
        return tuple(tuple(sorted(vs)) for vs in neighbours)

    @cached_property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(len(vs) for vs in self.adjacency)

    def leaves(self) -> List[int]:
        return [v for v, d in enumerate(self.degrees) if d == 1]

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(self.edges)
        return graph


@dataclass(frozen=True)
class TreeClass:
    """
    Most specific tree family, with its parameters.

    tag is one of Linear, Star, Bistar, Caterpillar, KQuasistar, General.
    k1 is set for Bistar, k and l for KQuasistar. tags lists every family that matches.
    """

    tag: str
    k1: Optional[int] = None
    k: Optional[int] = None
    l: Optional[int] = None
    tags: Tuple[str, ...] = field(default_factory=tuple)


CLASS_PRIORITY = ("Star", "Linear", "Bistar", "KQuasistar", "Caterpillar", "General")


# ============= CONSTRUCTION =============

def _normalize_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


def build_tree(n: int, edges: Sequence[Sequence[int]], root: Optional[int] = None) -> FreeTree:
    """
    Validate an edge list and return a FreeTree.

    Args:
        n: Number of vertices (at least 1)
        edges: Unordered vertex pairs, 0-based
        root: Optional syntactic root

    Returns:
        FreeTree with edges normalized to (min, max) and sorted

    Raises:
        WrongEdgeCount, VertexOutOfRange, CycleDetected, DuplicateEdge, NotConnected
    """
    if n < 1:
        raise WrongEdgeCount(f"a tree needs at least one vertex, got n={n}")
    if len(edges) != n - 1:
        raise WrongEdgeCount(f"a tree on {n} vertices has {n - 1} edges, got {len(edges)}")

    seen = set()
    normalized: List[Edge] = []
    for pair in edges:
        u, v = int(pair[0]), int(pair[1])
        if not (0 <= u < n and 0 <= v < n):
            raise VertexOutOfRange(f"edge ({u}, {v}) outside 0..{n - 1}")
        if u == v:
            raise CycleDetected(f"self-loop at vertex {u}")
        edge = _normalize_edge(u, v)
        if edge in seen:
            raise DuplicateEdge(f"edge {edge} listed twice")
        seen.add(edge)
        normalized.append(edge)

    if root is not None and not 0 <= root < n:
        raise VertexOutOfRange(f"root {root} outside 0..{n - 1}")

    tree = FreeTree(n=n, edges=tuple(sorted(normalized)), root=root)
    # n-1 distinct edges: connected if and only if acyclic
    if n > 1 and not nx.is_connected(tree.to_networkx()):
        raise NotConnected(f"edges on {n} vertices do not form a single component")
    return tree


def from_head_vector(heads: Sequence[int]) -> FreeTree:
    """
    Tree from a 1-based head vector; 0 marks the root.

    The root check is left to the caller (treebank parsing reports MultipleRoots).
    """
    edges = []
    root = None
    for i, head in enumerate(heads):
        if head == 0:
            root = i
        else:
            edges.append((i, head - 1))
    return build_tree(len(heads), edges, root=root)


def to_head_vector(t: FreeTree) -> List[int]:
    """1-based head vector oriented away from t.root (vertex 0 when rootless)."""
    root = t.root if t.root is not None else 0
    heads = [0] * t.n
    stack = [root]
    visited = {root}
    while stack:
        u = stack.pop()
        for v in t.adjacency[u]:
            if v not in visited:
                visited.add(v)
                heads[v] = u + 1
                stack.append(v)
    return heads


def random_tree(n: int, rng: np.random.Generator, with_root: bool = False) -> FreeTree:
    """Uniformly random labelled tree via a random Prufer sequence."""
    if n == 1:
        return build_tree(1, [], root=0 if with_root else None)
    if n == 2:
        return build_tree(2, [(0, 1)], root=0 if with_root else None)
    sequence = rng.integers(0, n, size=n - 2).tolist()
    graph = nx.from_prufer_sequence(sequence)
    root = int(rng.integers(0, n)) if with_root else None
    return build_tree(n, list(graph.edges()), root=root)


# ============= DEGREE STATISTICS =============

def degree_second_moment(t: FreeTree) -> Fraction:
    """<k^2> = (1/n) * sum of squared degrees, exact."""
    return Fraction(sum(d * d for d in t.degrees), t.n)


# ============= CENTROIDS AND CANONICAL FORM =============

def _subtree_sizes(t: FreeTree, root: int) -> Tuple[List[int], List[int]]:
    parent = [-1] * t.n
    order = [root]
    parent[root] = root
    for u in order:
        for v in t.adjacency[u]:
            if parent[v] == -1:
                parent[v] = u
                order.append(v)
    sizes = [1] * t.n
    for u in reversed(order[1:]):
        sizes[parent[u]] += sizes[u]
    return sizes, parent


def centroids(t: FreeTree) -> List[int]:
    """The one or two vertices whose largest hanging component is smallest."""
    if t.n == 1:
        return [0]
    sizes, parent = _subtree_sizes(t, 0)
    best: List[int] = []
    best_weight = t.n
    for u in range(t.n):
        weight = t.n - sizes[u]
        for v in t.adjacency[u]:
            if parent[v] == u and v != u:
                weight = max(weight, sizes[v])
        if weight < best_weight:
            best_weight, best = weight, [u]
        elif weight == best_weight:
            best.append(u)
    return best


def _ahu_code(t: FreeTree, root: int) -> str:
    _, parent = _subtree_sizes(t, root)
    order = [root]
    for u in order:
        order.extend(v for v in t.adjacency[u] if parent[v] == u and v != root)
    codes: Dict[int, str] = {}
    for u in reversed(order):
        children = sorted(codes[v] for v in t.adjacency[u] if parent[v] == u and v != root)
        codes[u] = "(" + "".join(children) + ")"
    return codes[root]


def canonical_form(t: FreeTree) -> str:
    """AHU encoding rooted at the centroid; equal codes iff isomorphic trees."""
    return min(_ahu_code(t, c) for c in centroids(t))


# ============= CLASSIFICATION =============

def _is_star(t: FreeTree) -> bool:
    return t.n <= 2 or max(t.degrees) == t.n - 1


def _is_linear(t: FreeTree) -> bool:
    return t.n <= 2 or max(t.degrees) <= 2


def _bistar_hub(t: FreeTree) -> Optional[int]:
    best = None
    for u, v in t.edges:
        if t.degrees[u] + t.degrees[v] == t.n:
            k1 = max(t.degrees[u], t.degrees[v])
            best = k1 if best is None else max(best, k1)
    return best


def _quasistar_params(t: FreeTree) -> Optional[Tuple[int, int]]:
    degrees = t.degrees
    found = None
    for hub in sorted(range(t.n), key=lambda v: (-degrees[v], v)):
        k = l = 0
        for w in t.adjacency[hub]:
            if degrees[w] == 1:
                l += 1
            elif degrees[w] == 2 and all(degrees[x] == 1 for x in t.adjacency[w] if x != hub):
                k += 1
            else:
                break
        else:
            if k >= 1 and 2 * k + l + 1 == t.n:
                found = (k, l)
                break
    return found


def _is_caterpillar(t: FreeTree) -> bool:
    if t.n <= 3:
        return True
    spine = [v for v in range(t.n) if t.degrees[v] > 1]
    spine_set = set(spine)
    for v in spine:
        if sum(1 for w in t.adjacency[v] if w in spine_set) > 2:
            return False
    return True


def classify(t: FreeTree) -> TreeClass:
    """
    Detect the special families a tree belongs to.

    The reported tag follows CLASS_PRIORITY; for n <= 3 Star wins over Linear.
    """
    tags: List[str] = []
    if _is_star(t):
        tags.append("Star")
    if _is_linear(t):
        tags.append("Linear")
    k1 = _bistar_hub(t) if t.n >= 2 else None
    if k1 is not None:
        tags.append("Bistar")
    quasi = _quasistar_params(t) if t.n >= 3 else None
    if quasi is not None:
        tags.append("KQuasistar")
    if _is_caterpillar(t):
        tags.append("Caterpillar")
    tags.append("General")

    tag = next(name for name in CLASS_PRIORITY if name in tags)
    return TreeClass(
        tag=tag,
        k1=k1 if "Bistar" in tags else None,
        k=quasi[0] if quasi else None,
        l=quasi[1] if quasi else None,
        tags=tuple(tags),
    )


# ============= ENUMERATION =============

def generate_free_trees(n: int, cap: Optional[int] = None) -> Iterator[FreeTree]:
    """
    Yield one representative per isomorphism class of trees on n vertices.

    Uses networkx's Wright-Richmond-Odlyzko-McKay generator.

    Raises:
        BadArgs: n < 1
        CapExceeded: n above the configured cap
    """
    limit = FREE_TREE_CAP if cap is None else cap
    if n < 1:
        raise BadArgs(f"free trees need n >= 1, got n={n}")
    if n > limit:
        raise CapExceeded(f"free-tree enumeration capped at n={limit}, asked for n={n}")
    return _free_trees(n)


def _free_trees(n: int) -> Iterator[FreeTree]:
    if n == 1:
        yield build_tree(1, [])
        return
    if n == 2:
        yield build_tree(2, [(0, 1)])
        return
    for graph in nx.nonisomorphic_trees(n):
        yield build_tree(n, list(graph.edges()))

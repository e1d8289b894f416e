# Omega Engine - Baselines
# Random baseline (D_rla, V_rla), optimal baseline (D_min) and worst case (D_max)

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, FrozenSet, List, Optional, Tuple, Union

import config
from core.arrangement import LinearArrangement
from core.errors import BadArgs, Degenerate, TooLarge, UnsupportedClass
from core.tree import FreeTree, TreeClass, classify

logger = logging.getLogger(__name__)


@dataclass
class BaselineBundle:
    """
    Baselines of one tree with the provenance of every value.

    Provenance strings are "ClosedForm(<class>)", "Solver" or "Oracle".
    d_max is None unless requested and computable within the cap.
    """

    n: int
    d_rla: Fraction
    v_rla: Fraction
    d_min: int
    d_max: Optional[int] = None
    provenance: Dict[str, str] = field(default_factory=dict)
    d_min_arrangement: Optional[LinearArrangement] = None


# ============= RANDOM BASELINE =============

def expected_D_rla(n: int) -> Fraction:
    """E[D] under uniformly random arrangements: (n^2 - 1)/3."""
    return Fraction(n * n - 1, 3)


def edge_length_variance(n: int) -> Fraction:
    """Variance of one edge length when its endpoints take two random distinct positions."""
    return Fraction((n + 1) * (n - 2), 18)


def shared_pair_covariance(n: int) -> Fraction:
    """Covariance of the lengths of two edges that share a vertex."""
    return Fraction((n + 1) * (n - 8), 180)


def disjoint_pair_covariance(n: int) -> Fraction:
    """Covariance of the lengths of two vertex-disjoint edges."""
    return Fraction(-(n + 1), 45)


def variance_D_rla(t: FreeTree) -> Fraction:
    """
    Exact variance of D over uniformly random arrangements.

    Decomposes the variance of a sum of n-1 edge lengths into single-edge variances
    plus pair covariances, split by whether the two edges share a vertex.

    Raises:
        Degenerate: n < 2
    """
    n = t.n
    if n < 2:
        raise Degenerate("the variance of D needs at least one edge")
    q_s = sum(comb(d, 2) for d in t.degrees)
    q_d = comb(n - 1, 2) - q_s
    return (
        (n - 1) * edge_length_variance(n)
        + 2 * q_s * shared_pair_covariance(n)
        + 2 * q_d * disjoint_pair_covariance(n)
    )


# ============= D_MIN: EXACT SOLVER =============
# Tree MinLA by centroid decomposition. An optimal arrangement places whole
# subtrees of the central vertex u as contiguous blocks, the larger ones further
# out, alternating sides; the rest of the tree (T*) sits in the middle. Blocks are
# "anchored": their root is pulled toward u. The solver evaluates every block
# count and side split and keeps the cheapest, memoizing by vertex set.

Layout = Tuple[int, ...]


class _MinLASolver:
    def __init__(self, t: FreeTree):
        self.adjacency = t.adjacency
        self._free_memo: Dict[FrozenSet[int], Tuple[int, Layout]] = {}
        self._anchored_memo: Dict[Tuple[FrozenSet[int], int], Tuple[int, Layout]] = {}

    def _branches(self, vertices: FrozenSet[int], u: int) -> List[Tuple[int, FrozenSet[int]]]:
        """Subtrees hanging from u inside vertices, as (root, vertex set), largest first."""
        branches = []
        for v in self.adjacency[u]:
            if v not in vertices:
                continue
            seen = {v}
            stack = [v]
            while stack:
                x = stack.pop()
                for y in self.adjacency[x]:
                    if y != u and y in vertices and y not in seen:
                        seen.add(y)
                        stack.append(y)
            branches.append((v, frozenset(seen)))
        branches.sort(key=lambda item: (-len(item[1]), min(item[1])))
        return branches

    def _centroids(self, vertices: FrozenSet[int]) -> List[int]:
        size = len(vertices)
        start = min(vertices)
        parent = {start: start}
        order = [start]
        for x in order:
            for y in self.adjacency[x]:
                if y in vertices and y not in parent:
                    parent[y] = x
                    order.append(y)
        below = {x: 1 for x in order}
        for x in reversed(order[1:]):
            below[parent[x]] += below[x]
        weights = {}
        for x in order:
            heaviest = size - below[x]
            for y in self.adjacency[x]:
                if y in vertices and parent.get(y) == x and y != x:
                    heaviest = max(heaviest, below[y])
            weights[x] = heaviest
        best = min(weights.values())
        return sorted(x for x, w in weights.items() if w == best)

    def free(self, vertices: FrozenSet[int]) -> Tuple[int, Layout]:
        cached = self._free_memo.get(vertices)
        if cached is not None:
            return cached
        if len(vertices) == 1:
            result = (0, tuple(vertices))
        else:
            result = min(
                (self._arrange(vertices, u, anchored=False) for u in self._centroids(vertices)),
                key=lambda item: item[0],
            )
        self._free_memo[vertices] = result
        return result

    def anchored(self, vertices: FrozenSet[int], root: int) -> Tuple[int, Layout]:
        """Optimal cost with root pulled to the left end: D plus root's offset."""
        key = (vertices, root)
        cached = self._anchored_memo.get(key)
        if cached is not None:
            return cached
        if len(vertices) == 1:
            result = (0, (root,))
        else:
            result = self._arrange(vertices, root, anchored=True)
        self._anchored_memo[key] = result
        return result

    def _arrange(self, vertices: FrozenSet[int], u: int, anchored: bool) -> Tuple[int, Layout]:
        branches = self._branches(vertices, u)
        blocks = [(len(vs), self.anchored(vs, v)) for v, vs in branches]
        shift = 1 if anchored else 0
        best: Optional[Tuple[int, Layout]] = None

        for m in range(1, len(branches) + 1):
            rest = vertices.difference(*(vs for _, vs in branches[:m]))
            rest_size = len(rest)
            for left in range(m + 1):
                right = m - left
                pull_left, pull_right = left + shift, right
                if abs(pull_left - pull_right) > 1:
                    continue

                # slot = (edges crossing the block, side, depth from the outside)
                slots = [(shift + d, 0, d) for d in range(left)] + [(d, 1, d) for d in range(right)]
                slots.sort()
                cost = 0
                left_blocks: List[Tuple[int, Layout]] = []
                right_blocks: List[Tuple[int, Layout]] = []
                for (crossings, side, depth), (size, (inner, layout)) in zip(slots, blocks):
                    cost += inner + 1 + crossings * size
                    if side == 0:
                        left_blocks.append((depth, tuple(reversed(layout))))
                    else:
                        right_blocks.append((depth, layout))

                cost += min(pull_left, pull_right) * (rest_size - 1)
                if pull_left == pull_right:
                    middle_cost, middle = self.free(rest)
                else:
                    middle_cost, middle = self.anchored(rest, u)
                    if pull_right > pull_left:
                        middle = tuple(reversed(middle))
                cost += middle_cost

                if best is None or cost < best[0]:
                    layout: List[int] = []
                    for _, block in sorted(left_blocks):
                        layout.extend(block)
                    layout.extend(middle)
                    for _, block in sorted(right_blocks, reverse=True):
                        layout.extend(block)
                    best = (cost, tuple(layout))
        return best


def d_min_exact(t: FreeTree) -> Tuple[int, LinearArrangement]:
    """
    Exact unconstrained minimum of D and a witnessing arrangement.

    Args:
        t: Any free tree

    Returns:
        (D_min, arrangement achieving it)
    """
    if t.n == 1:
        return 0, LinearArrangement.identity(1)
    solver = _MinLASolver(t)
    cost, layout = solver.free(frozenset(range(t.n)))
    return cost, LinearArrangement.from_order(layout)


def d_min_closed(tree_class: Union[TreeClass, str], n: int) -> int:
    """Closed forms: Linear -> n-1, Star -> (n^2 - n mod 2)/4."""
    tag = tree_class.tag if isinstance(tree_class, TreeClass) else tree_class
    if tag == "Linear":
        return max(n - 1, 0)
    if tag == "Star":
        return (n * n - n % 2) // 4
    raise UnsupportedClass(f"no closed-form D_min for class {tag}")


def _triangular(x: int) -> int:
    return x * (x + 1) // 2


def _hub_cost(leaves: int) -> int:
    # hub with its leaves split around it, the hub-hub edge leaving on the lighter side
    heavy, light = (leaves + 1) // 2, leaves // 2
    return _triangular(heavy) + _triangular(light) + light


def d_min_bistar(n: int, k1: int) -> int:
    """D_min of the bistar whose hubs have degrees k1 and n - k1."""
    if not 1 <= n - k1 <= k1 <= n - 1:
        raise BadArgs(f"bistar needs ceil(n/2) <= k1 <= n-1, got n={n}, k1={k1}")
    return 1 + _hub_cost(k1 - 1) + _hub_cost(n - k1 - 1)


# ============= D_MAX: CLOSED FORMS =============

def d_max_star(m: int, z: int) -> int:
    """Maximum D of a star with m edges whose vertices occupy z positions, hub at one end."""
    if not 0 <= m < z:
        raise BadArgs(f"star bound needs m < z, got m={m}, z={z}")
    return m * (2 * z - m - 1) // 2


def d_max_one_regular(m: int, z: int) -> int:
    """Maximum D of m independent edges within z positions."""
    if m < 0 or 2 * m > z:
        raise BadArgs(f"one-regular bound needs 2m <= z, got m={m}, z={z}")
    return m * (z - m)


def d_max_balanced_bistar(n: int) -> int:
    if n < 2:
        raise BadArgs("balanced bistar needs n >= 2")
    return (3 * (n - 1) ** 2 + 1 - n % 2) // 4


def d_max_bistar(n: int, k1: int) -> int:
    """
    D_max of the bistar with hub degrees k1 and k2 = n - k1.

    Hubs sit at opposite ends; each hub's leaves fill the positions nearest the other hub.
    """
    if not 1 <= n - k1 <= k1 <= n - 1:
        raise BadArgs(f"bistar needs ceil(n/2) <= k1 <= n-1, got n={n}, k1={k1}")
    k2 = n - k1
    return (n - 1) + 2 * _triangular(n - 2) - _triangular(k1 - 1) - _triangular(k2 - 1)


def d_max_k_quasistar(n: int, k: int) -> int:
    """
    D_max of a k-quasistar on n = 2k + l + 1 vertices: (n-1-k)(3k+n)/2.

    The star of the hub's n-1-k edges, hub at one end of all n positions, and the
    k independent arm-end edges spread over the other n-1 positions are maximal at once.
    """
    l = n - 1 - 2 * k
    if k < 0 or l < 0:
        raise BadArgs(f"k-quasistar needs n = 2k + l + 1 with l >= 0, got n={n}, k={k}")
    return d_max_star(n - 1 - k, n) + d_max_one_regular(k, n - 1)


def d_max_linear(n: int) -> int:
    """D_max of the path graph: floor(n^2/2) - 1."""
    if n < 2:
        return 0
    return n * n // 2 - 1


# ============= D_MAX: EXACT SEARCH =============

def _search_lower_bound(n: int, bound: str) -> int:
    if bound == "binomial":
        return comb(n, 2)
    if bound == "rla":
        rla = expected_D_rla(n)
        return -(-rla.numerator // rla.denominator)
    raise BadArgs(f"unknown D_max bound {bound!r}")


def d_max_search(
    t: FreeTree,
    cap: Optional[int] = None,
    bound: Optional[str] = None,
) -> Tuple[int, LinearArrangement]:
    """
    Exact maximum of D with a witnessing arrangement, by depth-first branch and bound.

    Arrangements are built left to right; D is the sum over gaps of the number of
    edges crossing each gap. Pruning:
      - a prefix set reached again with no larger partial sum is dominated;
      - reversal symmetry: a fixed internal vertex lies in the left half;
      - leaves of a common parent are placed in increasing id order;
      - arrangements where swapping two leaves of different parents increases D are rejected;
      - branches whose optimistic completion stays below the lower bound
        (D_rla, or C(n,2) with the "binomial" toggle) are cut.

    Raises:
        TooLarge: n above the cap (default 14)
    """
    limit = config.D_MAX_CAP if cap is None else cap
    mode = config.D_MAX_BOUND if bound is None else bound
    n = t.n
    if n > limit:
        raise TooLarge(f"D_max search capped at n={limit}, tree has n={n}")
    if n <= 2:
        return max(n - 1, 0), LinearArrangement.identity(n)

    adjacency = t.adjacency
    degrees = t.degrees
    neighbour_mask = [sum(1 << w for w in adjacency[v]) for v in range(n)]

    # twin leaves: each leaf waits for the previous leaf of the same parent
    prerequisite = [0] * n
    leaf_parent = {}
    by_parent: Dict[int, List[int]] = {}
    for v in range(n):
        if degrees[v] == 1:
            leaf_parent[v] = adjacency[v][0]
            by_parent.setdefault(adjacency[v][0], []).append(v)
    for twins in by_parent.values():
        for earlier, later in zip(twins, twins[1:]):
            prerequisite[later] = 1 << earlier

    pivot = max(range(n), key=lambda v: (degrees[v], -v))
    pivot_bit = 1 << pivot
    half = (n + 1) // 2
    full = (1 << n) - 1

    state = {"best": _search_lower_bound(n, mode) - 1, "order": None}
    dominance: Dict[int, int] = {}
    leaves = sorted(leaf_parent)

    def improvable(order: List[int]) -> bool:
        pos = [0] * n
        for index, vertex in enumerate(order):
            pos[vertex] = index
        for i, x in enumerate(leaves):
            px = pos[leaf_parent[x]]
            for y in leaves[i + 1:]:
                py = pos[leaf_parent[y]]
                if leaf_parent[x] == leaf_parent[y]:
                    continue
                before = abs(pos[x] - px) + abs(pos[y] - py)
                after = abs(pos[y] - px) + abs(pos[x] - py)
                if after > before:
                    return True
        return False

    def visit(mask: int, size: int, acc: int, cut: int, inside: int, order: List[int]) -> None:
        if size == n:
            if acc > state["best"] and not improvable(order):
                state["best"] = acc
                state["order"] = list(order)
            return
        outside = (n - 1) - inside - cut
        remaining_gaps = n - 1 - size
        optimistic = acc + (cut + outside) * remaining_gaps
        if optimistic <= state["best"]:
            return
        if dominance.get(mask, -1) >= acc:
            return
        dominance[mask] = acc
        if size == half and not mask & pivot_bit:
            return

        free = full & ~mask
        while free:
            low = free & -free
            v = low.bit_length() - 1
            free ^= low
            if prerequisite[v] and not mask & prerequisite[v]:
                continue
            linked = (neighbour_mask[v] & mask).bit_count()
            new_cut = cut + degrees[v] - 2 * linked
            order.append(v)
            visit(mask | low, size + 1, acc + new_cut, new_cut, inside + linked, order)
            order.pop()

    visit(0, 0, 0, 0, 0, [])
    if state["order"] is None:
        raise RuntimeError(f"D_max search found no arrangement above the {mode} bound")
    return state["best"], LinearArrangement.from_order(state["order"])


def d_max_exact(t: FreeTree, cap: Optional[int] = None, bound: Optional[str] = None) -> int:
    return d_max_search(t, cap=cap, bound=bound)[0]


# ============= DISPATCH =============

def compute_baselines(
    t: FreeTree,
    with_d_max: bool = False,
    d_max_cap: Optional[int] = None,
    tree_class: Optional[TreeClass] = None,
) -> BaselineBundle:
    """
    Baselines for one tree, preferring closed forms over solvers.

    Args:
        t: The tree
        with_d_max: Also compute D_max (closed form or capped search)
        d_max_cap: Override of the D_max search cap
        tree_class: Precomputed classification

    Returns:
        BaselineBundle with provenance per field
    """
    n = t.n
    cls = tree_class or classify(t)
    provenance = {"d_rla": "ClosedForm(any)", "v_rla": "ClosedForm(any)"}
    v_rla = variance_D_rla(t) if n >= 2 else Fraction(0)

    witness = None
    if cls.tag in ("Star", "Linear"):
        d_min = d_min_closed(cls, n)
        provenance["d_min"] = f"ClosedForm({cls.tag})"
    elif cls.tag == "Bistar":
        d_min = d_min_bistar(n, cls.k1)
        provenance["d_min"] = "ClosedForm(Bistar)"
    else:
        d_min, witness = d_min_exact(t)
        provenance["d_min"] = "Solver"

    d_max = None
    if with_d_max:
        if cls.tag == "Star":
            d_max = d_max_star(n - 1, n) if n >= 2 else 0
            provenance["d_max"] = "ClosedForm(Star)"
        elif cls.tag == "Linear":
            d_max = d_max_linear(n)
            provenance["d_max"] = "ClosedForm(Linear)"
        elif cls.tag == "Bistar":
            d_max = d_max_bistar(n, cls.k1)
            provenance["d_max"] = "ClosedForm(Bistar)"
        elif cls.tag == "KQuasistar":
            d_max = d_max_k_quasistar(n, cls.k)
            provenance["d_max"] = "ClosedForm(KQuasistar)"
        else:
            try:
                d_max = d_max_exact(t, cap=d_max_cap)
                provenance["d_max"] = "Solver"
            except TooLarge as e:
                logger.warning(f"D_max left empty: {e}")

    return BaselineBundle(
        n=n,
        d_rla=expected_D_rla(n),
        v_rla=v_rla,
        d_min=d_min,
        d_max=d_max,
        provenance=provenance,
        d_min_arrangement=witness,
    )

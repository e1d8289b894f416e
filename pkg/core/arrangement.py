# Omega Engine - Linear Arrangements
# Word orders as permutations, D computation, uniform shuffling, exhaustive enumeration

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import ENUMERATION_CAP
from core.errors import BadArgs, SizeMismatch, TooLarge
from core.tree import FreeTree, canonical_form

logger = logging.getLogger(__name__)


# ============= RANDOM STREAMS =============
# PCG64 generators seeded through SeedSequence; child streams come from spawn()
# so that every replicate block or sentence owns an independent substream.

def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def spawn_generators(seed: int, count: int, key: int = 0) -> List[np.random.Generator]:
    """
    Independent child generators for one seed.

    key separates families of streams drawn from the same seed (e.g. per test).
    """
    root = np.random.SeedSequence(entropy=seed, spawn_key=(key,))
    return [np.random.Generator(np.random.PCG64(child)) for child in root.spawn(count)]


# ============= ARRANGEMENTS =============

@dataclass(frozen=True)
class LinearArrangement:
    """Map vertex -> position in 1..n."""

    positions: Tuple[int, ...]

    def __post_init__(self):
        if sorted(self.positions) != list(range(1, len(self.positions) + 1)):
            raise BadArgs(f"positions {self.positions} are not a permutation of 1..n")

    @property
    def n(self) -> int:
        return len(self.positions)

    @classmethod
    def identity(cls, n: int) -> "LinearArrangement":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def from_order(cls, order: Sequence[int]) -> "LinearArrangement":
        """Arrangement from the left-to-right sequence of vertices."""
        positions = [0] * len(order)
        for index, vertex in enumerate(order):
            positions[vertex] = index + 1
        return cls(tuple(positions))

    def order(self) -> List[int]:
        result = [0] * self.n
        for vertex, position in enumerate(self.positions):
            result[position - 1] = vertex
        return result

    def reverse(self) -> "LinearArrangement":
        return LinearArrangement(tuple(self.n + 1 - p for p in self.positions))

    def root_position(self, t: FreeTree) -> Optional[int]:
        return None if t.root is None else self.positions[t.root]


def sum_edge_lengths(t: FreeTree, a: LinearArrangement) -> int:
    """D = sum over edges of |pi(u) - pi(v)|."""
    if a.n != t.n:
        raise SizeMismatch(f"arrangement of {a.n} positions for a tree of {t.n} vertices")
    pos = a.positions
    return sum(abs(pos[u] - pos[v]) for u, v in t.edges)


def shuffle_arrangement(n: int, rng: np.random.Generator) -> LinearArrangement:
    """Uniformly random arrangement (numpy's Fisher-Yates/Durstenfeld shuffle)."""
    order = rng.permutation(n)
    return LinearArrangement.from_order(order.tolist())


def random_positions(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """
    count independent uniform arrangements of n vertices, as a (count, n) array.

    Row r, column v holds the 0-based position of vertex v.
    """
    base = np.broadcast_to(np.arange(n, dtype=np.int64), (count, n))
    return rng.permuted(base, axis=1)


# ============= EXHAUSTIVE ENUMERATION =============

@dataclass
class DDistribution:
    """Exact distribution of D over all n! arrangements of one tree."""

    n: int
    tree_id: str
    counts: Dict[int, int] = field(default_factory=dict)
    argmin: Optional[LinearArrangement] = None
    argmax: Optional[LinearArrangement] = None

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def minimum(self) -> int:
        return min(self.counts)

    @property
    def maximum(self) -> int:
        return max(self.counts)

    @property
    def mean(self) -> Fraction:
        return Fraction(sum(d * c for d, c in self.counts.items()), self.total)

    @property
    def variance(self) -> Fraction:
        mean = self.mean
        second = Fraction(sum(d * d * c for d, c in self.counts.items()), self.total)
        return second - mean * mean

    def to_dict(self) -> Dict:
        return {
            "n": self.n,
            "tree_id": self.tree_id,
            "counts": {str(d): c for d, c in sorted(self.counts.items())},
            "mean": str(self.mean),
            "variance": str(self.variance),
            "min": self.minimum,
            "max": self.maximum,
        }


def enumerate_arrangements(t: FreeTree, cap: Optional[int] = None) -> DDistribution:
    """
    Visit all n! arrangements with Heap's algorithm, updating D per swap.

    Each swap moves two vertices, so only their incident edges are re-measured.

    Raises:
        TooLarge: n above the enumeration cap (default 10)
    """
    limit = ENUMERATION_CAP if cap is None else cap
    n = t.n
    if n > limit:
        raise TooLarge(f"enumeration capped at n={limit}, tree has n={n}")

    adjacency = t.adjacency
    order = list(range(n))
    pos = list(range(n))
    d = sum(abs(u - v) for u, v in t.edges)

    counts: Dict[int, int] = {d: 1}
    best_min, best_max = d, d
    argmin = argmax = tuple(pos)

    c = [0] * n
    i = 1
    while i < n:
        if c[i] < i:
            j = 0 if i % 2 == 0 else c[i]
            a, b = order[j], order[i]
            pa, pb = pos[a], pos[b]
            delta = 0
            for w in adjacency[a]:
                if w != b:
                    pw = pos[w]
                    delta += abs(pb - pw) - abs(pa - pw)
            for w in adjacency[b]:
                if w != a:
                    pw = pos[w]
                    delta += abs(pa - pw) - abs(pb - pw)
            order[j], order[i] = b, a
            pos[a], pos[b] = pb, pa
            d += delta

            counts[d] = counts.get(d, 0) + 1
            if d < best_min:
                best_min, argmin = d, tuple(pos)
            elif d > best_max:
                best_max, argmax = d, tuple(pos)

            c[i] += 1
            i = 1
        else:
            c[i] = 0
            i += 1

    return DDistribution(
        n=n,
        tree_id=canonical_form(t),
        counts=counts,
        argmin=LinearArrangement(tuple(p + 1 for p in argmin)),
        argmax=LinearArrangement(tuple(p + 1 for p in argmax)),
    )

# Omega Engine - Extremal Analysis
# Lowest possible Omega per tree and over all trees of a size

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Tuple, List, Dict

import config
from core.arrangement import LinearArrangement
from core.baselines import (
    d_max_balanced_bistar,
    d_max_bistar,
    d_max_linear,
    d_max_search,
    d_min_bistar,
    d_min_exact,
    expected_D_rla,
    compute_baselines,
)
from core.errors import CapExceeded, UndefinedForShort
from core.tree import FreeTree, build_tree, classify, generate_free_trees

logger = logging.getLogger(__name__)


@dataclass
class ExtremalReport:
    """
    Minimum of Omega_min over the trees of n vertices.

    alpha_bistar is the same minimum restricted to bistars (optimal hub degree k1);
    z1 is the analytic lower bound.
    """

    n: int
    alpha: Fraction
    witness: Optional[FreeTree]
    witness_arrangement: Optional[LinearArrangement]
    witness_class: str
    alpha_bistar: Fraction
    k1: int
    z1: Fraction
    trees_examined: int = 0
    trees_pruned: int = 0
    ansatz_holds: bool = True
    notes: List[str] = field(default_factory=list)

    def as_row(self) -> Dict[str, object]:
        return {
            "n": self.n,
            "alpha": str(self.alpha),
            "alpha_float": float(self.alpha),
            "alpha_bistar": str(self.alpha_bistar),
            "alpha_bistar_float": float(self.alpha_bistar),
            "k1": self.k1,
            "z1": str(self.z1),
            "z1_float": float(self.z1),
            "witness_class": self.witness_class,
            "trees_examined": self.trees_examined,
            "trees_pruned": self.trees_pruned,
            "ansatz_holds": self.ansatz_holds,
        }


def _ratio(d_rla: Fraction, d_max: int, d_min: int) -> Fraction:
    if d_rla == d_min:
        raise UndefinedForShort("Omega_min is undefined for n < 3")
    return (d_rla - d_max) / (d_rla - d_min)


def omega_min_tree(t: FreeTree, d_max_cap: Optional[int] = None) -> Fraction:
    """
    (D_rla - D_max) / (D_rla - D_min) for one tree.

    Closed forms are used where the family has one; otherwise the exact search,
    subject to its cap.
    """
    if t.n < 3:
        raise UndefinedForShort("Omega_min is undefined for n < 3")
    bundle = compute_baselines(t, with_d_max=True, d_max_cap=d_max_cap)
    if bundle.d_max is None:
        raise CapExceeded(f"D_max unavailable for n={t.n}")
    return _ratio(bundle.d_rla, bundle.d_max, bundle.d_min)


def z1_lower_bound(n: int) -> Fraction:
    """-(5n - 8 - 5(n mod 2)) / (n + 2 - n mod 2); tends to -5."""
    odd = n % 2
    return Fraction(-(5 * n - 8 - 5 * odd), n + 2 - odd)


def omega_min_linear(n: int) -> Fraction:
    return _ratio(expected_D_rla(n), d_max_linear(n), n - 1)


def alpha_bistar(n: int) -> Tuple[Fraction, int]:
    """
    Smallest Omega_min among bistars of n vertices and the hub degree k1 attaining it.

    Ties keep the smallest k1.
    """
    if n < 3:
        raise UndefinedForShort("alpha is defined for n >= 3")
    d_rla = expected_D_rla(n)
    best: Optional[Tuple[Fraction, int]] = None
    for k1 in range((n + 1) // 2, n):
        value = _ratio(d_rla, d_max_bistar(n, k1), d_min_bistar(n, k1))
        if best is None or value < best[0]:
            best = (value, k1)
    return best


def _bistar_witness(n: int, k1: int) -> Tuple[FreeTree, LinearArrangement]:
    """Bistar with hubs 0 and 1, plus its maximum arrangement (hubs at the two ends)."""
    edges = [(0, 1)]
    next_vertex = 2
    for _ in range(k1 - 1):
        edges.append((0, next_vertex))
        next_vertex += 1
    for _ in range(n - k1 - 1):
        edges.append((1, next_vertex))
        next_vertex += 1
    hub0_leaves = list(range(2, k1 + 1))
    hub1_leaves = list(range(k1 + 1, n))
    order = [0] + hub1_leaves + hub0_leaves + [1]
    return build_tree(n, edges), LinearArrangement.from_order(order)


def alpha_exact(n: int, cap: Optional[int] = None, prune: bool = True) -> ExtremalReport:
    """
    Exact alpha(n) = min over trees of Omega_min.

    Starts from alpha_bistar and streams every non-bistar, non-linear tree; a tree is
    skipped when even the balanced-bistar maximum cannot push its Omega_min below the
    current alpha. D_max is searched only for the survivors.

    Args:
        n: Tree size, 3 <= n <= cap
        cap: Override of the configured alpha cap
        prune: Disable to compute D_max for every tree

    Raises:
        CapExceeded: n above the cap
    """
    limit = config.ALPHA_CAP if cap is None else cap
    if n > limit:
        raise CapExceeded(f"alpha computation capped at n={limit}, asked for n={n}")
    if n < 3:
        raise UndefinedForShort("alpha is defined for n >= 3")

    d_rla = expected_D_rla(n)
    ceiling = d_max_balanced_bistar(n)
    value_bistar, k1 = alpha_bistar(n)
    alpha = value_bistar
    witness, witness_arrangement = _bistar_witness(n, k1)
    witness_class = "Bistar"
    examined = pruned = 0

    for t in generate_free_trees(n, cap=max(limit, n)):
        cls = classify(t)
        if "Bistar" in cls.tags or "Linear" in cls.tags:
            continue
        examined += 1
        d_min, _ = d_min_exact(t)
        lower = _ratio(d_rla, ceiling, d_min)
        if prune and alpha < lower:
            pruned += 1
            continue
        d_max, arrangement = d_max_search(t, cap=max(config.D_MAX_CAP, n))
        value = _ratio(d_rla, d_max, d_min)
        if value < alpha:
            alpha, witness, witness_arrangement = value, t, arrangement
            witness_class = cls.tag

    report = ExtremalReport(
        n=n,
        alpha=alpha,
        witness=witness,
        witness_arrangement=witness_arrangement,
        witness_class=witness_class,
        alpha_bistar=value_bistar,
        k1=k1,
        z1=z1_lower_bound(n),
        trees_examined=examined,
        trees_pruned=pruned,
        ansatz_holds=(alpha == value_bistar),
    )
    if not report.ansatz_holds:
        report.notes.append(f"bistar ansatz violated at n={n} by a {witness_class} tree")
        logger.warning(report.notes[-1])
    return report

# Omega Engine - Statistics
# Monte Carlo significance, Holm correction, length trends, pairwise ranking, Hasse diagrams

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy import stats as scipy_stats

import config
from core.arrangement import LinearArrangement, random_positions, spawn_generators
from core.baselines import BaselineBundle
from core.errors import (
    BadArgs,
    CycleDetected,
    Degenerate,
    EmptyCorpus,
    EmptySample,
    InconsistentInput,
    TooFewStrata,
)
from core.tree import FreeTree

logger = logging.getLogger(__name__)

GREATER = "greater"
LESS = "less"


@dataclass
class TestResult:
    """
    Outcome of one test.

    Monte Carlo tests fill replicates (T) and exceedances (F) with p_value = F/T;
    the Kendall test leaves them empty.
    """

    statistic: float
    side: str
    p_value: float
    replicates: Optional[int] = None
    exceedances: Optional[int] = None
    p_adjusted: Optional[float] = None
    method: str = "monte-carlo"

    __test__ = False


@dataclass
class RankResult:
    languages: List[str]
    means: Dict[str, float]
    pairs: List[Dict[str, object]] = field(default_factory=list)
    arcs: List[Tuple[str, str]] = field(default_factory=list)
    reduced_arcs: List[Tuple[str, str]] = field(default_factory=list)
    violations: List[Tuple[str, str, str]] = field(default_factory=list)
    holm: bool = True
    level: float = 0.05


# ============= MONTE CARLO SIGNIFICANCE =============

@dataclass
class _Stratum:
    n: int
    d_rla: float
    spread: np.ndarray      # D_rla - D_min per sentence
    tails: np.ndarray       # (sentences, n-1) edge endpoints
    heads: np.ndarray


def prepare_null_model(
    corpus: Sequence[Tuple[FreeTree, LinearArrangement, BaselineBundle]],
    length: Optional[int] = None,
) -> Tuple[List[_Stratum], float]:
    """
    Group sentences with n >= 3 by length into arrays for vectorized shuffling.

    Returns:
        (strata, observed <Omega>) where the observed mean uses the same float path
        as the replicates
    """
    by_length: Dict[int, List[Tuple[FreeTree, LinearArrangement, BaselineBundle]]] = {}
    for t, a, b in corpus:
        if t.n < 3 or (length is not None and t.n != length):
            continue
        by_length.setdefault(t.n, []).append((t, a, b))
    if not by_length:
        raise EmptyCorpus("no sentence with n >= 3 to test")

    strata: List[_Stratum] = []
    observed_positions: List[np.ndarray] = []
    for n in sorted(by_length):
        items = by_length[n]
        edges = np.array([t.edges for t, _, _ in items], dtype=np.int64).reshape(len(items), n - 1, 2)
        d_rla = float(items[0][2].d_rla)
        strata.append(_Stratum(
            n=n,
            d_rla=d_rla,
            spread=np.array([float(b.d_rla - b.d_min) for _, _, b in items]),
            tails=edges[:, :, 0],
            heads=edges[:, :, 1],
        ))
        observed_positions.append(np.array([a.positions for _, a, _ in items], dtype=np.int64) - 1)

    count = sum(len(s.spread) for s in strata)
    total = sum(_omega_sums(s, pos[np.newaxis])[0] for s, pos in zip(strata, observed_positions))
    return strata, total / count


def _omega_sums(stratum: _Stratum, positions: np.ndarray) -> np.ndarray:
    """Sum of Omega over the sentences of a stratum, for each replicate row of positions."""
    tails = np.take_along_axis(positions, np.broadcast_to(stratum.tails, positions.shape[:1] + stratum.tails.shape), axis=2)
    heads = np.take_along_axis(positions, np.broadcast_to(stratum.heads, positions.shape[:1] + stratum.heads.shape), axis=2)
    d = np.abs(tails - heads).sum(axis=2)
    return ((stratum.d_rla - d) / stratum.spread).sum(axis=1)


def _replicate_block(args) -> np.ndarray:
    strata, count, size, generator = args
    totals = np.zeros(size)
    for stratum in strata:
        sentences = len(stratum.spread)
        positions = random_positions(stratum.n, size * sentences, generator)
        totals += _omega_sums(stratum, positions.reshape(size, sentences, stratum.n))
    return totals / count


def _blocks(total: int, block: int) -> List[int]:
    sizes = [block] * (total // block)
    if total % block:
        sizes.append(total % block)
    return sizes


def mc_significance(
    corpus: Sequence[Tuple[FreeTree, LinearArrangement, BaselineBundle]],
    side: str = GREATER,
    replicates: int = config.DEFAULT_REPLICATES,
    seed: int = config.DEFAULT_SEED,
    length: Optional[int] = None,
    workers: int = 1,
    stream_key: int = 0,
) -> TestResult:
    """
    Monte Carlo test of <Omega> (or <Omega>(n) when length is set) against shuffling.

    Every replicate shuffles every sentence and recomputes the average; F counts the
    replicates at least as extreme as the observation (ties included), p = F/T.
    Replicates are drawn in fixed blocks, each from its own substream, so the result
    does not depend on the worker count.

    Args:
        corpus: (tree, observed arrangement, baselines) per sentence
        side: "greater" tests for a large average, "less" for a small one
        replicates: T
        seed: Root seed of the substreams
        length: Restrict to sentences of this length
        workers: Processes for the replicate blocks
        stream_key: Separates the substreams of distinct tests sharing a seed

    Raises:
        BadArgs: T < 1 or unknown side
        EmptyCorpus: nothing to test
    """
    if replicates < 1:
        raise BadArgs("the number of replicates T must be at least 1")
    if side not in (GREATER, LESS):
        raise BadArgs(f"unknown side {side!r}")
    strata, observed = prepare_null_model(corpus, length=length)
    count = sum(len(s.spread) for s in strata)

    sizes = _blocks(replicates, config.REPLICATE_BLOCK)
    generators = spawn_generators(seed, len(sizes), key=stream_key)
    jobs = [(strata, count, size, generator) for size, generator in zip(sizes, generators)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_replicate_block, jobs))
    else:
        results = [_replicate_block(job) for job in jobs]
    values = np.concatenate(results)

    if side == GREATER:
        exceed = int(np.count_nonzero(values >= observed))
    else:
        exceed = int(np.count_nonzero(values <= observed))
    return TestResult(
        statistic=float(observed),
        side=side,
        p_value=exceed / replicates,
        replicates=replicates,
        exceedances=exceed,
    )


# ============= MULTIPLE TESTING =============

def replace_zero_pvalues(ps: Sequence[float], replicates: int, epsilon: float = config.ZERO_P_EPSILON) -> List[float]:
    """Zero Monte Carlo p-values become (1 - epsilon)/T."""
    floor = (1 - epsilon) / replicates
    return [floor if p == 0 else p for p in ps]


def holm_adjust(ps: Sequence[float]) -> List[float]:
    """
    Holm step-down adjustment, returned in input order.

    q_i = min{1, max[p_i (m + 1 - i), q_(i-1)]} over the ascending p-values.
    """
    values = np.asarray(ps, dtype=float)
    m = len(values)
    if m == 0:
        return []
    order = np.argsort(values, kind="stable")
    scaled = values[order] * (m - np.arange(m))
    adjusted = np.minimum(1.0, np.maximum.accumulate(scaled))
    result = np.empty(m)
    result[order] = adjusted
    return result.tolist()


def p_magnitude(p: float) -> float:
    """-log10(p) rounded to one decimal; the 0.05 level reads 1.3."""
    return round(-math.log10(p), 1)


# ============= LENGTH TRENDS =============

def kendall_trend_test(ns: Sequence[int], means: Sequence[float], side: str = GREATER) -> TestResult:
    """
    One-sided Kendall tau-b between stratum lengths and stratum means.

    Exact permutation p-value for up to 10 strata without ties, tie-corrected
    normal approximation otherwise.

    Raises:
        TooFewStrata: fewer than 3 distinct lengths
        Degenerate: all stratum means equal (tau undefined)
    """
    if side not in (GREATER, LESS):
        raise BadArgs(f"unknown side {side!r}")
    if len(set(ns)) < 3:
        raise TooFewStrata(f"need at least 3 distinct lengths, got {len(set(ns))}")
    x = np.asarray(ns, dtype=float)
    y = np.asarray(means, dtype=float)
    if len(set(y.tolist())) < 2:
        raise Degenerate("stratum means are all equal")
    ties = len(set(x.tolist())) < len(x) or len(set(y.tolist())) < len(y)
    method = "exact" if len(x) <= 10 and not ties else "asymptotic"
    result = scipy_stats.kendalltau(x, y, variant="b", alternative=side, method=method)
    return TestResult(
        statistic=float(result.statistic if hasattr(result, "statistic") else result[0]),
        side=side,
        p_value=float(result.pvalue),
        method=f"kendall-{method}",
    )


# ============= PAIRWISE LANGUAGE COMPARISON =============

def pairwise_language_test(
    x: Sequence[float],
    y: Sequence[float],
    replicates: int = config.DEFAULT_PAIRWISE_REPLICATES,
    seed: int = config.DEFAULT_SEED,
    stream_key: int = 0,
) -> TestResult:
    """
    Is the sum of y larger than random subsets of the merged sample?

    p is the proportion of T uniform |y|-subsets of x + y whose sum exceeds sum(y).
    Call with y the sample of larger mean. Sums within 1e-9 (relative) of sum(y)
    count as ties, not exceedances.

    Raises:
        EmptySample: either sample empty
    """
    if len(x) == 0 or len(y) == 0:
        raise EmptySample("both samples need at least one value")
    if replicates < 1:
        raise BadArgs("the number of replicates T must be at least 1")
    merged = np.concatenate([np.asarray(x, dtype=float), np.asarray(y, dtype=float)])
    size = len(y)
    target = float(np.sum(np.asarray(y, dtype=float)))
    tolerance = 1e-9 * max(1.0, abs(target))

    sizes = _blocks(replicates, config.REPLICATE_BLOCK)
    generators = spawn_generators(seed, len(sizes), key=stream_key)
    exceed = 0
    for block, generator in zip(sizes, generators):
        shuffled = generator.permuted(np.broadcast_to(merged, (block, len(merged))), axis=1)
        sums = shuffled[:, :size].sum(axis=1)
        exceed += int(np.count_nonzero(sums > target + tolerance))
    return TestResult(
        statistic=target / size,
        side=GREATER,
        p_value=exceed / replicates,
        replicates=replicates,
        exceedances=exceed,
    )


def _pair_job(args) -> TestResult:
    x, y, replicates, seed, key = args
    return pairwise_language_test(x, y, replicates=replicates, seed=seed, stream_key=key)


def pairwise_tests(
    samples: Dict[str, Sequence[float]],
    replicates: int = config.DEFAULT_PAIRWISE_REPLICATES,
    seed: int = config.DEFAULT_SEED,
    workers: int = 1,
) -> Tuple[Dict[str, float], Dict[Tuple[str, str], TestResult]]:
    """
    One oriented test per unordered pair of languages.

    Pairs are keyed (x, y) with mean_x < mean_y (ties broken by name); each pair
    draws from its own substream, numbered in sorted pair order.
    """
    means = {lang: float(np.mean(values)) for lang, values in samples.items() if len(values)}
    if len(means) < len(samples):
        raise EmptySample("every language needs at least one Omega value")
    pairs = []
    for a, b in combinations(sorted(samples), 2):
        low, high = (a, b) if (means[a], a) < (means[b], b) else (b, a)
        pairs.append((low, high))
    jobs = [
        (samples[low], samples[high], replicates, seed, index + 1)
        for index, (low, high) in enumerate(pairs)
    ]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_pair_job, jobs))
    else:
        results = [_pair_job(job) for job in jobs]
    return means, dict(zip(pairs, results))


# ============= PARTIAL ORDER =============

def build_partial_order(
    languages: Sequence[str],
    means: Dict[str, float],
    pairwise_ps: Dict[Tuple[str, str], float],
    replicates: int,
    level: float = config.SIGNIFICANCE_LEVEL,
    holm: bool = True,
    epsilon: float = config.ZERO_P_EPSILON,
) -> RankResult:
    """
    Strict partial order "x < y": y is significantly more optimized than x.

    Zero p-values are replaced, Holm runs over all C(L, 2) p-values (unless disabled),
    and each significant pair yields an arc y -> x.

    Args:
        languages: All languages
        means: Mean Omega per language
        pairwise_ps: p per pair (x, y) with means[x] <= means[y]
        replicates: T used for the pairwise tests (zero replacement)
        level: Significance level
        holm: Apply Holm's correction

    Raises:
        InconsistentInput: a pair missing, duplicated or oriented against the means
    """
    names = sorted(languages)
    expected = len(names) * (len(names) - 1) // 2
    if len(pairwise_ps) != expected:
        raise InconsistentInput(f"expected {expected} pairwise p-values, got {len(pairwise_ps)}")
    keys = sorted(pairwise_ps)
    for low, high in keys:
        if low not in means or high not in means:
            raise InconsistentInput(f"pair ({low}, {high}) names an unknown language")
        if means[low] > means[high]:
            raise InconsistentInput(f"pair ({low}, {high}) is oriented against the means")
    if len({frozenset(k) for k in keys}) != len(keys):
        raise InconsistentInput("a pair is listed in both orientations")

    raw = replace_zero_pvalues([pairwise_ps[k] for k in keys], replicates, epsilon)
    adjusted = holm_adjust(raw) if holm else list(raw)

    result = RankResult(
        languages=sorted(names, key=lambda lang: (-means[lang], lang)),
        means=dict(means),
        holm=holm,
        level=level,
    )
    for (low, high), p, q in zip(keys, raw, adjusted):
        significant = q <= level
        result.pairs.append({"x": low, "y": high, "p": p, "q": q, "significant": significant})
        if significant:
            result.arcs.append((high, low))

    result.violations = transitivity_violations(result.arcs)
    if result.violations:
        logger.warning(f"{len(result.violations)} transitivity violations in the significance relation")
    reduced = transitive_reduction(result.arcs, nodes=names)
    result.reduced_arcs = sorted(reduced.edges())
    logger.info(f"Ranking: {len(result.arcs)} arcs, {len(result.reduced_arcs)} after transitive reduction")
    return result


def transitivity_violations(arcs: Iterable[Tuple[str, str]]) -> List[Tuple[str, str, str]]:
    """Triples (z, y, x) with arcs z -> y and y -> x but no arc z -> x."""
    arc_set = set(arcs)
    below: Dict[str, List[str]] = {}
    for high, low in arc_set:
        below.setdefault(high, []).append(low)
    violations = []
    for z in sorted(below):
        for y in sorted(below[z]):
            for x in sorted(below.get(y, [])):
                if (z, x) not in arc_set:
                    violations.append((z, y, x))
    return violations


def transitive_reduction(arcs: Iterable[Tuple[str, str]], nodes: Optional[Iterable[str]] = None) -> nx.DiGraph:
    """
    Minimal arc set with the same reachability (the Hasse diagram of a strict order).

    Raises:
        CycleDetected: the relation contains a cycle
    """
    graph = nx.DiGraph()
    if nodes is not None:
        graph.add_nodes_from(nodes)
    graph.add_edges_from(arcs)
    if not nx.is_directed_acyclic_graph(graph):
        raise CycleDetected("the significance relation contains a cycle")
    return nx.transitive_reduction(graph)


def rank_languages(
    samples: Dict[str, Sequence[float]],
    replicates: int = config.DEFAULT_PAIRWISE_REPLICATES,
    seed: int = config.DEFAULT_SEED,
    level: float = config.SIGNIFICANCE_LEVEL,
    holm: bool = True,
    epsilon: float = config.ZERO_P_EPSILON,
    workers: int = 1,
) -> RankResult:
    means, results = pairwise_tests(samples, replicates=replicates, seed=seed, workers=workers)
    return build_partial_order(
        list(samples),
        means,
        {pair: result.p_value for pair, result in results.items()},
        replicates=replicates,
        level=level,
        holm=holm,
        epsilon=epsilon,
    )

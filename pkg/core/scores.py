# Omega Engine - Scores
# Per-sentence optimality scores and their treebank averages

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Dict, List, Optional, Sequence, Union

import pandas as pd

import config
from core.arrangement import LinearArrangement, sum_edge_lengths
from core.baselines import BaselineBundle
from core.errors import BadRoot, Degenerate, EmptyCorpus, UndefinedForShort, ZeroVariance
from core.tree import FreeTree

logger = logging.getLogger(__name__)

Number = Union[int, Fraction, float]

SCORE_NAMES = ["D", "d_bar", "D0", "Gamma", "Delta", "Dz", "NDD", "Omega"]


def _exact(x: Number) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


# ============= SCORE FUNCTIONS =============

def omega(d: Number, d_rla: Number, d_min: Number) -> Fraction:
    """
    Omega = (D_rla - D) / (D_rla - D_min).

    1 at the minimum, 0 on average under random arrangements.

    Raises:
        UndefinedForShort: D_rla equals D_min (trees with n < 3)
    """
    spread = _exact(d_rla) - _exact(d_min)
    if spread == 0:
        raise UndefinedForShort("Omega is undefined when D_rla = D_min (n < 3)")
    return (_exact(d_rla) - _exact(d)) / spread


def gamma(d: Number, d_min: Number) -> Fraction:
    """Gamma = D / D_min, D in units of its minimum."""
    if _exact(d_min) == 0:
        raise UndefinedForShort("Gamma needs D_min > 0 (n >= 2)")
    return _exact(d) / _exact(d_min)


def delta(d: Number, d_min: Number) -> Number:
    """Delta = D - D_min."""
    return d - d_min


def d_z(d: Number, d_rla: Number, v_rla: Number) -> float:
    """
    z-score of D against the random baseline: (D - D_rla) / sqrt(V_rla).

    The square is formed exactly so the result depends only on the exact ratio.
    """
    variance = _exact(v_rla)
    if variance <= 0:
        raise ZeroVariance("D_z needs a positive random-baseline variance (n >= 3)")
    excess = _exact(d) - _exact(d_rla)
    magnitude = math.sqrt(float(excess * excess / variance))
    return math.copysign(magnitude, float(excess)) if excess != 0 else 0.0


def ndd(d: Number, n: int, root_position: int, log_base: Optional[float] = None) -> float:
    """
    NDD = |log( (D/(n-1)) / sqrt(pi_r * n) )|.

    Natural log unless log_base is given.
    """
    if n < 2:
        raise Degenerate("NDD needs at least one edge")
    if not 1 <= root_position <= n:
        raise BadRoot(f"root position {root_position} outside 1..{n}")
    ratio = (float(d) / (n - 1)) / math.sqrt(root_position * n)
    value = math.log(ratio)
    if log_base is not None:
        value /= math.log(log_base)
    return abs(value)


def expected_ndd_approx(n: int) -> float:
    """Approximate E_rla[NDD] = -log((sqrt(2)/3)(1 + 1/n))."""
    return -math.log((math.sqrt(2) / 3) * (1 + 1 / n))


def expected_gamma_bounds(n: int) -> tuple:
    """(star, linear) bounds of E_rla[Gamma] over trees of n >= 2 vertices."""
    low = Fraction(4, 3) * Fraction(n * n - 1, n * n - n % 2)
    high = Fraction(n + 1, 3)
    return low, high


def expected_delta_bounds(n: int) -> tuple:
    """(star, linear) bounds of E_rla[Delta] over trees of n >= 2 vertices."""
    low = Fraction(n * n - 4 + 3 * (n % 2), 12)
    high = Fraction((n - 1) * (n - 2), 3)
    return low, high


def score_bounds_table(n: int) -> Dict[str, float]:
    gamma_low, gamma_high = expected_gamma_bounds(n)
    delta_low, delta_high = expected_delta_bounds(n)
    return {
        "n": n,
        "E_Gamma_star": float(gamma_low),
        "E_Gamma_linear": float(gamma_high),
        "E_Delta_star": float(delta_low),
        "E_Delta_linear": float(delta_high),
        "E_NDD_approx": expected_ndd_approx(n),
    }


# ============= RECORDS =============

@dataclass
class ScoreRecord:
    """All scores of one sentence. Scores that cannot be computed are None, never zero."""

    sentence_id: str
    n: int
    D: int
    root_position: Optional[int]
    d_rla: Fraction
    d_min: int
    d_bar: Optional[Fraction] = None
    D0: Optional[int] = None
    Gamma: Optional[Fraction] = None
    Delta: Optional[int] = None
    Dz: Optional[float] = None
    NDD: Optional[float] = None
    Omega: Optional[Fraction] = None
    language: str = ""

    def as_row(self) -> Dict[str, object]:
        def out(x):
            return None if x is None else float(x) if isinstance(x, Rational) and not isinstance(x, int) else x

        return {
            "language": self.language,
            "sentence_id": self.sentence_id,
            "n": self.n,
            "D": self.D,
            "root_position": self.root_position,
            "D_rla": float(self.d_rla),
            "D_min": self.d_min,
            "d_bar": out(self.d_bar),
            "D0": self.D0,
            "Gamma": out(self.Gamma),
            "Delta": self.Delta,
            "Dz": self.Dz,
            "NDD": self.NDD,
            "Omega": out(self.Omega),
        }


@dataclass
class AggregateRow:
    language: str
    count: int
    means: Dict[str, Optional[float]] = field(default_factory=dict)
    n: Optional[int] = None


def score_sentence(
    t: FreeTree,
    a: LinearArrangement,
    b: BaselineBundle,
    sentence_id: str = "",
    language: str = "",
    log_base: Optional[float] = None,
) -> ScoreRecord:
    """
    Compose every score for one sentence.

    Omega and D_z need n >= 3, NDD needs a root; missing inputs leave the score absent.
    """
    d = sum_edge_lengths(t, a)
    n = t.n
    root_position = a.root_position(t)
    record = ScoreRecord(
        sentence_id=sentence_id,
        language=language,
        n=n,
        D=d,
        root_position=root_position,
        d_rla=b.d_rla,
        d_min=b.d_min,
    )
    if n >= 2:
        record.d_bar = Fraction(d, n - 1)
        record.D0 = d - (n - 1)
        record.Gamma = gamma(d, b.d_min)
        record.Delta = delta(d, b.d_min)
        if root_position is not None:
            base = log_base if log_base is not None else config.NDD_LOG_BASE
            record.NDD = ndd(d, n, root_position, log_base=base)
    if n >= 3:
        record.Omega = omega(d, b.d_rla, b.d_min)
        record.Dz = d_z(d, b.d_rla, b.v_rla)
    return record


# ============= AGGREGATION =============

def records_frame(records: Sequence[ScoreRecord]) -> pd.DataFrame:
    return pd.DataFrame([r.as_row() for r in records])


def aggregate(records: Sequence[ScoreRecord], group_by: str = "language") -> List[AggregateRow]:
    """
    Mean of every score per language, or per (language, n).

    Means skip sentences where a score is undefined; count is the number of
    sentences in the group. Groups without sentences never appear.

    Args:
        records: Score records
        group_by: "language" or "language_n"
    """
    if not records:
        raise EmptyCorpus("no records to aggregate")
    keys = ["language"] if group_by == "language" else ["language", "n"]
    frame = records_frame(records)
    rows: List[AggregateRow] = []
    for key, group in frame.groupby(keys, sort=True):
        key = key if isinstance(key, tuple) else (key,)
        means = {}
        for name in SCORE_NAMES:
            values = pd.to_numeric(group[name], errors="coerce")
            means[name] = float(values.mean()) if values.notna().any() else None
        rows.append(AggregateRow(
            language=key[0],
            n=int(key[1]) if len(key) > 1 else None,
            count=len(group),
            means=means,
        ))
    return rows


def aggregate_frame(rows: Sequence[AggregateRow]) -> pd.DataFrame:
    table = []
    for row in rows:
        entry = {"language": row.language}
        if row.n is not None:
            entry["n"] = row.n
        entry["count"] = row.count
        entry.update({f"mean_{name}": value for name, value in row.means.items()})
        table.append(entry)
    return pd.DataFrame(table)


def family_rollup(language_table: pd.DataFrame, score: str = "Omega") -> pd.DataFrame:
    """
    Min, mean, median and max of language-level means per family, plus an "All" row.

    Args:
        language_table: One row per language with columns family and mean_<score>
    """
    column = f"mean_{score}"
    summary = []
    groups = list(language_table.groupby("family", sort=True))
    groups.append(("All", language_table))
    for family, group in groups:
        values = group[column].dropna()
        if values.empty:
            continue
        summary.append({
            "family": family,
            "score": score,
            "languages": int(group["language"].nunique()),
            "min": float(values.min()),
            "mean": float(values.mean()),
            "median": float(values.median()),
            "max": float(values.max()),
        })
    return pd.DataFrame(summary)


def blend_short_sentences(
    mean_omega: float,
    total: int,
    n1: int,
    n2: int,
    gamma1: float,
    gamma2: float,
) -> float:
    """(1 - theta) <Omega> + (N1 gamma1 + N2 gamma2) / N with theta = (N1 + N2) / N."""
    theta = (n1 + n2) / total
    long_part = 0.0 if theta == 1 else (1 - theta) * mean_omega
    return long_part + (n1 * gamma1 + n2 * gamma2) / total


def omega_all_lengths(records: Sequence[ScoreRecord], gamma1: float, gamma2: float) -> float:
    """Average Omega over all sentences, giving n = 1 and n = 2 the conventional values."""
    if not records:
        raise EmptyCorpus("no records")
    n1 = sum(1 for r in records if r.n == 1)
    n2 = sum(1 for r in records if r.n == 2)
    long_values = [r.Omega for r in records if r.Omega is not None]
    mean_omega = float(sum(long_values, Fraction(0)) / len(long_values)) if long_values else 0.0
    return blend_short_sentences(mean_omega, len(records), n1, n2, gamma1, gamma2)

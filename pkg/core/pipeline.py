# Omega Engine - Pipeline
# Orchestrates load, preprocess, baselines, scoring, tests, ranking and output, with a run log

import logging
import time
from dataclasses import dataclass
from datetime import datetime
from typing import Any, Callable, Dict, List, Optional, Tuple

import pandas as pd

import config
from config import RunConfig
from core.arrangement import enumerate_arrangements
from core.baselines import BaselineBundle, compute_baselines, expected_D_rla
from core.errors import CapExceeded, Degenerate, EmptyCorpus, OmegaError, TooFewStrata
from core.extremal import alpha_bistar, alpha_exact, omega_min_linear, z1_lower_bound
from core.output_generator import OutputGenerator
from core.scores import (
    SCORE_NAMES,
    ScoreRecord,
    aggregate,
    aggregate_frame,
    family_rollup,
    omega_all_lengths,
    records_frame,
    score_bounds_table,
    score_sentence,
)
from core.stats import (
    GREATER,
    LESS,
    holm_adjust,
    kendall_trend_test,
    mc_significance,
    p_magnitude,
    rank_languages,
    replace_zero_pvalues,
)
from core.tree import FreeTree, canonical_form, classify, generate_free_trees, to_head_vector
from core.treebank import Corpus, Sentence, load_corpora, reparallelize, theta_stats
from db.service import DatabaseService

logger = logging.getLogger(__name__)

LANGUAGE_STATS = ["min", "mean", "median", "max"]


@dataclass
class ScoredSentence:
    sentence: Sentence
    baselines: BaselineBundle
    record: ScoreRecord


class OmegaEngine:
    """
    Runs the commands of one configuration.
    Every stage is recorded in the run log with its timing, context and outcome.
    """

    def __init__(self, run_config: RunConfig, database: Optional[DatabaseService] = None):
        self.config = run_config
        self.db = database
        if self.db is None and run_config.database_url:
            self.db = DatabaseService(run_config.database_url)
        self.run_log: List[Dict[str, Any]] = []
        self.output = OutputGenerator(run_config.out)
        self._cache: Dict[Tuple[str, bool], BaselineBundle] = {}
        self._preprocessed: Optional[Dict[str, Corpus]] = None
        self._corpora: Optional[Dict[str, Corpus]] = None
        self._scored: Optional[Dict[str, List[ScoredSentence]]] = None
        self._run_id: Optional[int] = None

    # ============= RUN LOG =============

    def stage(self, action_type: str, fn: Callable, *args, context: Optional[Dict[str, Any]] = None, **kwargs):
        """Run one stage and log it; failures are logged and re-raised."""
        stage_id = f"{action_type}_{len(self.run_log) + 1:03d}"
        record = {
            "stage_id": stage_id,
            "timestamp": datetime.now().isoformat(),
            "action_type": action_type,
            "context": context or {},
        }
        started = time.perf_counter()
        try:
            result = fn(*args, **kwargs)
        except Exception as e:
            record.update({
                "status": "error",
                "duration": time.perf_counter() - started,
                "error": str(e),
                "error_type": type(e).__name__,
            })
            self.run_log.append(record)
            logger.error(f"Stage {stage_id} failed: {e}")
            raise
        record.update({"status": "success", "duration": time.perf_counter() - started, "error": None})
        self.run_log.append(record)
        return result

    def get_run_log(self) -> List[Dict[str, Any]]:
        return self.run_log

    def _begin(self, command: str) -> None:
        if self.db is not None:
            self._run_id = self.db.start_run(command, self.config.seed, self.config.model_dump(mode="json"))

    def _finish(self, error: Optional[Exception] = None) -> None:
        self.output.write_json("run_log", self.run_log, kind="run_log")
        if self.db is not None and self._run_id is not None:
            for artifact in self.output.written:
                self.db.add_artifact(self._run_id, artifact["kind"], artifact["path"], artifact["rows"])
            self.db.finish_run(self._run_id, "error" if error else "success", str(error) if error else None)

    def _run(self, command: str, body: Callable[[], Dict[str, Any]]) -> Dict[str, Any]:
        self._begin(command)
        try:
            result = body()
        except (OmegaError, OSError) as e:
            self._finish(e)
            raise
        self._finish()
        return result

    # ============= SHARED STAGES =============

    def load(self) -> Dict[str, Corpus]:
        if self._corpora is None:
            corpora = self.stage(
                "load",
                load_corpora,
                self.config.inputs,
                fmt=self.config.input_format,
                dataset=self.config.dataset,
                workers=self.config.workers,
                context={"inputs": len(self.config.inputs), "format": self.config.input_format},
            )
            if not corpora:
                raise EmptyCorpus("no input sentences")
            self._preprocessed = corpora
            if self.config.reparallelize:
                corpora = self.stage("reparallelize", reparallelize, corpora)
            self._corpora = corpora
        return self._corpora

    def baselines(self, t: FreeTree, with_d_max: bool = False) -> BaselineBundle:
        """
        Baselines through the shape cache (in-process, then database).

        Only shape invariants are cached, so the labelled D_min witness is not kept.
        """
        code = canonical_form(t)
        key = (code, with_d_max)
        if key in self._cache:
            return self._cache[key]

        bundle = None
        if self.db is not None:
            cached = self.db.get_baselines(code)
            if cached and (cached["d_max"] is not None or not with_d_max):
                bundle = BaselineBundle(
                    n=t.n,
                    d_rla=expected_D_rla(t.n),
                    v_rla=cached["v_rla"],
                    d_min=cached["d_min"],
                    d_max=cached["d_max"] if with_d_max else None,
                    provenance=cached["provenance"],
                )
        if bundle is None:
            bundle = compute_baselines(t, with_d_max=with_d_max)
            bundle.d_min_arrangement = None
            if self.db is not None:
                self.db.put_baselines(code, t.n, bundle.d_min, bundle.v_rla, bundle.d_max, bundle.provenance)
        self._cache[key] = bundle
        return bundle

    def _score_all(self, corpora: Dict[str, Corpus]) -> Dict[str, List[ScoredSentence]]:
        scored: Dict[str, List[ScoredSentence]] = {}
        for language, corpus in corpora.items():
            items = []
            for s in corpus.sentences:
                bundle = self.baselines(s.tree)
                sentence_id = f"{s.doc_id}/{s.sent_id}" if s.doc_id else s.sent_id
                record = score_sentence(s.tree, s.arrangement, bundle, sentence_id=sentence_id, language=language)
                items.append(ScoredSentence(sentence=s, baselines=bundle, record=record))
            scored[language] = items
        return scored

    def score(self) -> Dict[str, List[ScoredSentence]]:
        if self._scored is None:
            corpora = self.load()
            self._scored = self.stage(
                "score",
                self._score_all,
                corpora,
                context={"languages": len(corpora), "sentences": sum(len(c) for c in corpora.values())},
            )
        return self._scored

    def _records(self) -> List[ScoreRecord]:
        return [item.record for items in self.score().values() for item in items]

    # ============= ANALYZE =============

    def language_table(self) -> pd.DataFrame:
        """One row per language: counts, theta and min/mean/median/max of every score."""
        frame = records_frame(self._records())
        rows = []
        analyzed = self.score()
        for language in sorted(analyzed):
            # theta describes the preprocessed corpus, before any reparallelization
            meta = theta_stats(self._preprocessed[language])
            group = frame[frame["language"] == language]
            row: Dict[str, Any] = {
                "language": language,
                "family": meta.family,
                "dataset": meta.dataset,
                "count": len(analyzed[language]),
                "N1": meta.N1,
                "N2": meta.N2,
                "theta": meta.theta,
            }
            for name in SCORE_NAMES:
                values = pd.to_numeric(group[name], errors="coerce").dropna() if not group.empty else pd.Series(dtype=float)
                for stat in LANGUAGE_STATS:
                    row[f"{stat}_{name}"] = float(getattr(values, stat)()) if not values.empty else None
            row["percentage_Omega"] = None if row["mean_Omega"] is None else 100 * row["mean_Omega"]
            if self.config.gamma1 is not None and self.config.gamma2 is not None:
                records = [item.record for item in self.score()[language]]
                row["Omega_all"] = omega_all_lengths(records, self.config.gamma1, self.config.gamma2) if records else None
            rows.append(row)
        return pd.DataFrame(rows)

    def length_table(self) -> pd.DataFrame:
        rows = aggregate(self._records(), group_by="language_n")
        frame = aggregate_frame(rows)
        in_range = (frame["n"] >= self.config.nmin) & (frame["n"] <= self.config.nmax)
        return frame[in_range].reset_index(drop=True)

    def cmd_analyze(self) -> Dict[str, Any]:
        """Per-sentence scores, per-language summaries, per-(language, n) means and family rollups."""
        def body():
            records = self._records()
            if not records:
                raise EmptyCorpus("no sentences to analyze")
            sentences = records_frame(records)
            languages = self.stage("aggregate_languages", self.language_table)
            lengths = self.stage("aggregate_lengths", self.length_table)
            families = pd.concat(
                [family_rollup(languages, score) for score in SCORE_NAMES if languages[f"mean_{score}"].notna().any()],
                ignore_index=True,
            )
            self.output.write_table("sentences", sentences)
            self.output.write_table("languages", languages)
            self.output.write_table("language_length", lengths)
            self.output.write_table("families", families)
            self.output.write_text("summary.md", self.output.format_for_export({
                "title": "Word order optimality",
                "facts": {
                    "Languages": len(languages),
                    "Sentences": len(sentences),
                    "Dataset": self.config.dataset,
                },
                "tables": {"Languages": languages[["language", "family", "count", "mean_Omega", "percentage_Omega"]]},
            }))
            return {"sentences": sentences, "languages": languages, "language_length": lengths, "families": families}

        return self._run("analyze", body)

    # ============= SIGNIFICANCE =============

    def _triples(self, language: str) -> List[Tuple[FreeTree, Any, BaselineBundle]]:
        return [(item.sentence.tree, item.sentence.arrangement, item.baselines) for item in self.score()[language]]

    def _holm_rows(self, rows: List[Dict[str, Any]]) -> None:
        """Zero replacement and Holm (unless disabled) over one family of rows, in place."""
        if not rows:
            return
        raw = replace_zero_pvalues([r["p"] for r in rows], self.config.replicates, self.config.epsilon)
        adjusted = holm_adjust(raw) if self.config.holm else raw
        for row, p, q in zip(rows, raw, adjusted):
            row["p"] = p
            row["p_adjusted"] = q
            row["significant"] = q <= self.config.alpha
            row["magnitude"] = p_magnitude(q)

    def significance_table(self) -> pd.DataFrame:
        languages = sorted(self.score())
        families: Dict[Tuple[str, Optional[int]], List[Dict[str, Any]]] = {}
        for index, language in enumerate(languages):
            triples = self._triples(language)
            tests = [("Omega_large", GREATER, None)]
            tests.extend(("Omega_n_small", LESS, n) for n in config.SHORT_LENGTHS)
            for test, side, length in tests:
                try:
                    result = mc_significance(
                        triples,
                        side=side,
                        replicates=self.config.replicates,
                        seed=self.config.seed,
                        length=length,
                        workers=self.config.workers,
                        stream_key=1 + 100 * index + (length or 0),
                    )
                except EmptyCorpus:
                    logger.info(f"{language}: no sentence for {test} (n={length})")
                    continue
                families.setdefault((test, length), []).append({
                    "language": language,
                    "family": config.get_family(language),
                    "dataset": self.config.dataset,
                    "test": test,
                    "n": length,
                    "side": side,
                    "statistic": result.statistic,
                    "T": result.replicates,
                    "F": result.exceedances,
                    "p": result.p_value,
                })
        rows = []
        for key in sorted(families, key=lambda k: (k[0], k[1] or 0)):
            self._holm_rows(families[key])
            rows.extend(families[key])
        return pd.DataFrame(rows, columns=[
            "language", "family", "dataset", "test", "n", "side", "statistic", "T", "F",
            "p", "p_adjusted", "significant", "magnitude",
        ])

    @staticmethod
    def summary_table(tests: pd.DataFrame, keys: List[str]) -> pd.DataFrame:
        """l0 languages, f_H significant after correction, and the exceptions, per test."""
        rows = []
        for key, group in tests.groupby(keys, sort=True, dropna=False):
            key = key if isinstance(key, tuple) else (key,)
            exceptions = sorted(group.loc[~group["significant"].astype(bool), "language"])
            row = dict(zip(keys, key))
            row.update({
                "l0": int(group["language"].nunique()),
                "f_H": int(group["significant"].astype(bool).sum()),
                "exceptions": len(exceptions),
                "exception_languages": ";".join(exceptions),
            })
            rows.append(row)
        return pd.DataFrame(rows)

    def cmd_significance(self) -> Dict[str, Any]:
        def body():
            tests = self.stage("monte_carlo", self.significance_table, context={"T": self.config.replicates})
            summary = self.summary_table(tests, ["dataset", "test", "n"]) if not tests.empty else pd.DataFrame()
            self.output.write_table("significance", tests)
            self.output.write_table("significance_summary", summary)
            return {"significance": tests, "summary": summary}

        return self._run("significance", body)

    # ============= TREND =============

    def trend_table(self) -> pd.DataFrame:
        lengths = self.length_table()
        lengths = lengths[lengths["count"] >= self.config.min_stratum_count]
        families: Dict[Tuple[str, str], List[Dict[str, Any]]] = {}
        for language, group in lengths.groupby("language", sort=True):
            for score in SCORE_NAMES:
                column = group[["n", f"mean_{score}"]].dropna()
                for side in (GREATER, LESS):
                    try:
                        result = kendall_trend_test(column["n"].tolist(), column[f"mean_{score}"].tolist(), side=side)
                    except (TooFewStrata, Degenerate):
                        continue
                    families.setdefault((score, side), []).append({
                        "language": language,
                        "family": config.get_family(language),
                        "score": score,
                        "side": side,
                        "strata": len(column),
                        "tau": result.statistic,
                        "method": result.method,
                        "p": result.p_value,
                    })
        rows = []
        for key in sorted(families):
            group = families[key]
            adjusted = holm_adjust([r["p"] for r in group]) if self.config.holm else [r["p"] for r in group]
            for row, q in zip(group, adjusted):
                row["p_adjusted"] = q
                row["significant"] = q <= self.config.alpha
                row["magnitude"] = p_magnitude(q) if q > 0 else None
            rows.extend(group)
        return pd.DataFrame(rows, columns=[
            "language", "family", "score", "side", "strata", "tau", "method",
            "p", "p_adjusted", "significant", "magnitude",
        ])

    def cmd_trend(self) -> Dict[str, Any]:
        def body():
            trends = self.stage("kendall", self.trend_table)
            summary = self.summary_table(trends, ["score", "side"]) if not trends.empty else pd.DataFrame()
            self.output.write_table("trend", trends)
            self.output.write_table("trend_summary", summary)
            return {"trend": trends, "summary": summary}

        return self._run("trend", body)

    # ============= RANK =============

    def omega_samples(self) -> Dict[str, List[float]]:
        samples = {}
        for language, items in sorted(self.score().items()):
            values = [float(item.record.Omega) for item in items if item.record.Omega is not None]
            if values:
                samples[language] = values
            else:
                logger.warning(f"{language}: no sentence with n >= 3, left out of the ranking")
        return samples

    def cmd_rank(self) -> Dict[str, Any]:
        def body():
            samples = self.omega_samples()
            if len(samples) < 2:
                raise EmptyCorpus("ranking needs at least two languages with Omega values")
            result = self.stage(
                "rank",
                rank_languages,
                samples,
                replicates=self.config.pairwise_replicates,
                seed=self.config.seed,
                level=self.config.alpha,
                holm=self.config.holm,
                epsilon=self.config.epsilon,
                workers=self.config.workers,
                context={"languages": len(samples), "T": self.config.pairwise_replicates},
            )
            ranking = pd.DataFrame([
                {
                    "rank": position + 1,
                    "language": language,
                    "family": config.get_family(language),
                    "count": len(samples[language]),
                    "mean_Omega": result.means[language],
                }
                for position, language in enumerate(result.languages)
            ])
            pairs = pd.DataFrame(result.pairs, columns=["x", "y", "p", "q", "significant"])
            arcs = pd.DataFrame([{
                "languages": len(result.languages),
                "holm": result.holm,
                "arcs": len(result.arcs),
                "reduced_arcs": len(result.reduced_arcs),
                "transitivity_violations": len(result.violations),
            }])
            logger.info(f"Hasse diagram: {len(result.arcs)} arcs reduced to {len(result.reduced_arcs)}")
            self.output.write_table("ranking", ranking)
            self.output.write_table("pairwise", pairs)
            self.output.write_table("rank_summary", arcs)
            self.output.write_dot("hasse", result)
            return {"ranking": ranking, "pairwise": pairs, "summary": arcs, "result": result}

        return self._run("rank", body)

    # ============= EXTREMAL AND ORACLE =============

    def extremal_table(self, nmin: int, nmax: int) -> pd.DataFrame:
        """alpha where the exhaustive search is within its cap, alpha_bistar and Z1 everywhere."""
        rows = []
        for n in range(max(nmin, 3), nmax + 1):
            if n <= config.ALPHA_CAP:
                row = alpha_exact(n).as_row()
            else:
                value, k1 = alpha_bistar(n)
                z1 = z1_lower_bound(n)
                row = {
                    "n": n, "alpha": None, "alpha_float": None,
                    "alpha_bistar": str(value), "alpha_bistar_float": float(value), "k1": k1,
                    "z1": str(z1), "z1_float": float(z1), "witness_class": None,
                    "trees_examined": None, "trees_pruned": None, "ansatz_holds": None,
                }
            linear = omega_min_linear(n)
            row["omega_min_linear"] = str(linear)
            row["omega_min_linear_float"] = float(linear)
            row.update({k: v for k, v in score_bounds_table(n).items() if k != "n"})
            rows.append(row)
        return pd.DataFrame(rows)

    def cmd_extremal(self) -> Dict[str, Any]:
        def body():
            table = self.stage(
                "extremal",
                self.extremal_table,
                self.config.nmin,
                self.config.nmax,
                context={"nmin": self.config.nmin, "nmax": self.config.nmax},
            )
            self.output.write_table("extremal", table)
            return {"extremal": table}

        return self._run("extremal", body)

    @staticmethod
    def oracle_dump(nmin: int, nmax: int) -> List[Dict[str, Any]]:
        """Exact D distributions of every unlabelled tree, with the baselines the solvers report."""
        if nmax > config.ENUMERATION_CAP:
            raise CapExceeded(f"oracle enumeration capped at n={config.ENUMERATION_CAP}, asked for n={nmax}")
        entries = []
        for n in range(max(nmin, 1), nmax + 1):
            for t in generate_free_trees(n):
                distribution = enumerate_arrangements(t)
                bundle = compute_baselines(t, with_d_max=True)
                entry = distribution.to_dict()
                entry.update({
                    "class": classify(t).tag,
                    "heads": to_head_vector(t),
                    "d_rla": str(bundle.d_rla),
                    "v_rla": str(bundle.v_rla),
                    "d_min": bundle.d_min,
                    "d_max": bundle.d_max,
                    "agrees": (
                        distribution.minimum == bundle.d_min
                        and distribution.maximum == bundle.d_max
                        and distribution.mean == bundle.d_rla
                        and distribution.variance == bundle.v_rla
                    ),
                })
                entries.append(entry)
        return entries

    def cmd_oracle(self) -> Dict[str, Any]:
        def body():
            entries = self.stage("oracle", self.oracle_dump, self.config.nmin, self.config.nmax)
            disagreements = [e["tree_id"] for e in entries if not e["agrees"]]
            if disagreements:
                logger.error(f"{len(disagreements)} trees disagree with exhaustive enumeration")
            self.output.write_json("oracle", entries, kind="oracle")
            return {"oracle": entries, "disagreements": disagreements}

        return self._run("oracle", body)


def run_command(command: str, run_config: RunConfig) -> Dict[str, Any]:
    """Build an engine for one configuration and run a command by name."""
    engine = OmegaEngine(run_config)
    handlers = {
        "analyze": engine.cmd_analyze,
        "significance": engine.cmd_significance,
        "trend": engine.cmd_trend,
        "rank": engine.cmd_rank,
        "extremal": engine.cmd_extremal,
        "oracle": engine.cmd_oracle,
    }
    return handlers[command]()

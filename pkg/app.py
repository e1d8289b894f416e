# Omega Engine - Command Line
# Entry point: python app.py <command> [options]

import argparse
import logging
import sys
from typing import List, Optional

import config
from config import make_run_config
from core.errors import OmegaError
from core.pipeline import run_command

logger = logging.getLogger("omega")

CORPUS_COMMANDS = ["analyze", "significance", "trend", "rank"]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default="out", help="Output directory")
    parser.add_argument("--seed", type=int, default=None, help=f"Random seed (default {config.DEFAULT_SEED})")
    parser.add_argument("--workers", type=int, default=None, help="Worker processes")
    parser.add_argument("--database", default=None, help="SQLAlchemy URL of the baseline cache and run records")
    parser.add_argument("--log-level", default=None, help="Logging level")


def _add_corpus(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--input", "-i", action="append", required=True, metavar="[LANG=]PATH",
        help="Treebank file; repeat for several. The language defaults to the file-name prefix.",
    )
    parser.add_argument("--format", choices=config.INPUT_FORMATS, default="conllu")
    parser.add_argument("--dataset", choices=config.DATASETS, default="UD")
    parser.add_argument("-T", dest="replicates", type=int, default=None, help="Monte Carlo replicates")
    parser.add_argument("--pairwise-T", dest="pairwise_replicates", type=int, default=None,
                        help="Replicates of each pairwise language test")
    parser.add_argument("--alpha", type=float, default=None, help="Significance level")
    parser.add_argument("--epsilon", type=float, default=None, help="Zero p-value replacement epsilon")
    parser.add_argument("--nmin", type=int, default=None)
    parser.add_argument("--nmax", type=int, default=None)
    parser.add_argument("--min-stratum-count", type=int, default=None,
                        help="Sentences needed for a length to enter the trend test")
    parser.add_argument("--no-holm", action="store_true", help="Skip Holm's correction")
    parser.add_argument("--gamma1", type=float, default=None, help="Omega given to sentences of length 1")
    parser.add_argument("--gamma2", type=float, default=None, help="Omega given to sentences of length 2")
    parser.add_argument("--reparallelize", action="store_true",
                        help="Keep only sentences surviving in every language (parallel collections)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="omega", description=config.APP_DESCRIPTION)
    commands = parser.add_subparsers(dest="command", required=True)

    helps = {
        "analyze": "Score every sentence and summarize per language, length and family",
        "significance": "Monte Carlo tests of Omega against random word orders",
        "trend": "Kendall tau between mean scores and sentence length",
        "rank": "Pairwise language comparison and Hasse diagram",
    }
    for name in CORPUS_COMMANDS:
        sub = commands.add_parser(name, help=helps[name])
        _add_corpus(sub)
        _add_common(sub)

    extremal = commands.add_parser("extremal", help="alpha, alpha over bistars and the analytic bound per n")
    extremal.add_argument("--nmin", type=int, default=3)
    extremal.add_argument("--nmax", type=int, default=config.ALPHA_CAP)
    _add_common(extremal)

    oracle = commands.add_parser("oracle", help="Exhaustive D distributions of all small trees")
    oracle.add_argument("--nmin", type=int, default=1)
    oracle.add_argument("--nmax", type=int, default=8)
    _add_common(oracle)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=(args.log_level or config.get_log_level()).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    options = {
        "out": args.out,
        "seed": args.seed,
        "workers": args.workers,
        "database_url": args.database,
        "nmin": args.nmin,
        "nmax": args.nmax,
    }
    if args.command in CORPUS_COMMANDS:
        options.update({
            "inputs": args.input,
            "input_format": args.format,
            "dataset": args.dataset,
            "replicates": args.replicates,
            "pairwise_replicates": args.pairwise_replicates,
            "alpha": args.alpha,
            "epsilon": args.epsilon,
            "min_stratum_count": args.min_stratum_count,
            "holm": not args.no_holm,
            "gamma1": args.gamma1,
            "gamma2": args.gamma2,
            "reparallelize": args.reparallelize,
        })

    try:
        run_config = make_run_config(**options)
        run_command(args.command, run_config)
    except OmegaError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

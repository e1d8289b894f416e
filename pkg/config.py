# Omega Engine - Configuration

import os
from pathlib import Path
from typing import List, Dict, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

load_dotenv()

# Malformed environment values fall back to their defaults; make_run_config reports them
ENV_ERRORS: List[str] = []


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name, "")
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError:
        ENV_ERRORS.append(f"{name} must be an integer, got {raw!r}")
        return default


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name, "")
    if not raw:
        return default
    try:
        return float(raw)
    except ValueError:
        ENV_ERRORS.append(f"{name} must be a number, got {raw!r}")
        return default


# Random streams
# Seeds feed numpy's SeedSequence; every run with the same seed is reproducible
DEFAULT_SEED = _env_int("OMEGA_SEED", 20200101)

# Monte Carlo
DEFAULT_REPLICATES = _env_int("OMEGA_REPLICATES", 10_000)
DEFAULT_PAIRWISE_REPLICATES = _env_int("OMEGA_PAIRWISE_REPLICATES", 100_000)
REPLICATE_BLOCK = 64
SIGNIFICANCE_LEVEL = _env_float("OMEGA_ALPHA", 0.05)
ZERO_P_EPSILON = _env_float("OMEGA_EPSILON", 0.01)
DEFAULT_WORKERS = _env_int("OMEGA_WORKERS", 1)

# Length strata for heatmaps and trend tests (sentences longer than 50 words are excluded)
DEFAULT_NMIN = _env_int("OMEGA_NMIN", 3)
DEFAULT_NMAX = _env_int("OMEGA_NMAX", 50)
MIN_STRATUM_COUNT = _env_int("OMEGA_MIN_STRATUM_COUNT", 1)

# Short-sentence anti-minimization tests
SHORT_LENGTHS = (3, 4)

# Caps for exponential routines
ENUMERATION_CAP = _env_int("OMEGA_ENUMERATION_CAP", 10)
FREE_TREE_CAP = _env_int("OMEGA_FREE_TREE_CAP", 20)
D_MAX_CAP = _env_int("OMEGA_D_MAX_CAP", 14)
ALPHA_CAP = _env_int("OMEGA_ALPHA_CAP", 12)

# Lower bound used to prune the D_max search: "rla" -> D_rla, "binomial" -> C(n, 2)
D_MAX_BOUND = os.getenv("OMEGA_D_MAX_BOUND", "rla")

# NDD logarithm base; natural log unless overridden
NDD_LOG_BASE: Optional[float] = None
if os.getenv("OMEGA_NDD_LOG_BASE"):
    NDD_LOG_BASE = _env_float("OMEGA_NDD_LOG_BASE", 0.0)

# Preprocessing
REMOVED_UPOS = frozenset(
    tag.strip() for tag in os.getenv("OMEGA_REMOVED_UPOS", "PUNCT").split(",") if tag.strip()
)
NULL_FORM_PATTERNS = [r"^$", r"^_$", r"^\*"]

# Database
DATABASE_URL = os.getenv("OMEGA_DATABASE_URL", "sqlite:///db/omega_cache.db")

# Logging
LOG_LEVEL = os.getenv("OMEGA_LOG_LEVEL", "INFO")

# App settings
APP_NAME = "Omega Engine"
APP_DESCRIPTION = "How optimized is the word order of a language?"
SCHEMA_VERSION = 1

DATASETS = ["UD", "SUD", "PUD", "PSUD", "Prague", "Stanford"]
INPUT_FORMATS = ["conllu", "heads", "internal"]

# Language families of the treebank collections
FAMILY_MEMBERS: Dict[str, List[str]] = {
    "Afro-Asiatic": ["Akkadian", "Amharic", "Arabic", "Assyrian", "Coptic", "Hebrew", "Maltese"],
    "Altaic": ["Kazakh", "Turkish", "Uyghur"],
    "Austro-Asiatic": ["Vietnamese"],
    "Austronesian": ["Indonesian", "Tagalog"],
    "Basque": ["Basque"],
    "Dravidian": ["Tamil", "Telugu"],
    "Indo-European": [
        "Afrikaans", "Albanian", "Ancient Greek", "Armenian", "Belarusian", "Bengali",
        "Bhojpuri", "Breton", "Bulgarian", "Catalan", "Croatian", "Czech", "Danish",
        "Dutch", "English", "Faroese", "French", "Galician", "German", "Gothic", "Greek",
        "Hindi", "Hindi-English", "Icelandic", "Irish", "Italian", "Kurmanji", "Latin",
        "Latvian", "Lithuanian", "Marathi", "Norwegian", "Old Church Slavonic",
        "Old French", "Old Russian", "Persian", "Polish", "Portuguese", "Romanian",
        "Russian", "Sanskrit", "Scottish Gaelic", "Serbian", "Slovak", "Slovenian",
        "Spanish", "Swedish", "Swiss German", "Ukrainian", "Upper Sorbian", "Urdu", "Welsh",
    ],
    "Japanese": ["Japanese"],
    "Korean": ["Korean"],
    "Mande": ["Bambara"],
    "Mongolic": ["Buryat"],
    "Niger-Congo": ["Wolof", "Yoruba"],
    "Other": ["Naija"],
    "Pama-Nyungan": ["Warlpiri"],
    "Sign Language": ["Swedish Sign Language"],
    "Sino-Tibetan": ["Cantonese", "Chinese", "Classical Chinese"],
    "Tai-Kadai": ["Thai"],
    "Tupian": ["Mbya Guarani"],
    "Uralic": [
        "Erzya", "Estonian", "Finnish", "Hungarian", "Karelian", "Komi-Permyak",
        "Komi-Zyrian", "Livvi", "Moksha", "North Sami", "Skolt Sami",
    ],
}

LANGUAGE_FAMILIES: Dict[str, str] = {
    language: family for family, members in FAMILY_MEMBERS.items() for language in members
}


def get_family(language: str) -> str:
    """Family of a language name; unknown languages fall into 'Other'."""
    return LANGUAGE_FAMILIES.get(language.replace("_", " "), "Other")


def get_database_url() -> str:
    return os.getenv("OMEGA_DATABASE_URL", DATABASE_URL)


def get_log_level() -> str:
    return os.getenv("OMEGA_LOG_LEVEL", LOG_LEVEL).upper()


class RunConfig(BaseModel):
    """
    Validated settings for one CLI run.

    Built from command-line flags layered over the environment defaults above.
    """

    inputs: List[str] = Field(default_factory=list)
    input_format: str = "conllu"
    dataset: str = "UD"
    replicates: int = DEFAULT_REPLICATES
    pairwise_replicates: int = DEFAULT_PAIRWISE_REPLICATES
    seed: int = DEFAULT_SEED
    alpha: float = SIGNIFICANCE_LEVEL
    epsilon: float = ZERO_P_EPSILON
    nmin: int = DEFAULT_NMIN
    nmax: int = DEFAULT_NMAX
    min_stratum_count: int = MIN_STRATUM_COUNT
    workers: int = DEFAULT_WORKERS
    holm: bool = True
    gamma1: Optional[float] = None
    gamma2: Optional[float] = None
    reparallelize: bool = False
    out: Path = Path("out")
    database_url: Optional[str] = None

    @field_validator("replicates", "pairwise_replicates")
    @classmethod
    def _positive_replicates(cls, value: int) -> int:
        if value < 1:
            raise ValueError("replicate count T must be at least 1")
        return value

    @field_validator("alpha")
    @classmethod
    def _level_in_unit_interval(cls, value: float) -> float:
        if not 0.0 < value < 1.0:
            raise ValueError("significance level must lie strictly between 0 and 1")
        return value

    @field_validator("epsilon")
    @classmethod
    def _epsilon_range(cls, value: float) -> float:
        if not 0.0 <= value < 1.0:
            raise ValueError("epsilon must lie in [0, 1)")
        return value

    @field_validator("workers", "min_stratum_count")
    @classmethod
    def _at_least_one(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be at least 1")
        return value

    @field_validator("input_format")
    @classmethod
    def _known_format(cls, value: str) -> str:
        if value not in INPUT_FORMATS:
            raise ValueError(f"format must be one of {INPUT_FORMATS}")
        return value

    @field_validator("dataset")
    @classmethod
    def _known_dataset(cls, value: str) -> str:
        if value not in DATASETS:
            raise ValueError(f"dataset must be one of {DATASETS}")
        return value

    @model_validator(mode="after")
    def _length_range(self) -> "RunConfig":
        if self.nmin < 1 or self.nmin > self.nmax:
            raise ValueError("length range requires 1 <= nmin <= nmax")
        return self


def make_run_config(**kwargs) -> RunConfig:
    """
    Build a RunConfig, turning pydantic validation failures into ConfigError.

    Keys with value None are dropped so that environment defaults apply.
    """
    if ENV_ERRORS:
        from core.errors import ConfigError
        raise ConfigError("Invalid environment: " + "; ".join(ENV_ERRORS))
    values = {key: value for key, value in kwargs.items() if value is not None}
    try:
        return RunConfig(**values)
    except ValidationError as e:
        from core.errors import ConfigError
        raise ConfigError(f"Invalid run configuration: {e}") from e

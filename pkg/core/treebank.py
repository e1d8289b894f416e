# Omega Engine - Treebanks
# CoNLL-U and head-vector ingestion, preprocessing, merging and reparallelization

import logging
import re
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, TextIO, Tuple

import conllu
from conllu.exceptions import ParseException
from pydantic import BaseModel, model_validator

import config
from core.arrangement import LinearArrangement
from core.errors import (
    AllTokensDeleted,
    EmptyCorpus,
    InputError,
    MalformedLine,
    MixedLanguages,
    MultipleRoots,
    NoCommonSentences,
    NonTreeHeads,
    TreeError,
)
from core.tree import FreeTree, build_tree, from_head_vector, to_head_vector

logger = logging.getLogger(__name__)

INTERNAL_HEADER = "# omega-corpus v1"
CONLLU_COLUMNS = 10

_INTEGER = re.compile(r"^\d+$")
_MULTIWORD = re.compile(r"^\d+-\d+$")
_EMPTY_NODE = re.compile(r"^\d+\.\d+$")


# ============= DATA TYPES =============

@dataclass
class Token:
    id: int
    form: str
    upos: str
    head: int
    deprel: str = ""


@dataclass
class RawSentence:
    """A sentence as found in the source: 1-based token ids, head 0 for the root."""

    tokens: List[Token]
    doc_id: str = ""
    sent_id: str = ""
    has_forms: bool = True
    line_no: int = 0

    @property
    def heads(self) -> List[int]:
        return [t.head for t in self.tokens]


@dataclass
class Sentence:
    """A preprocessed sentence. Vertex i sits at position i + 1 of the word order."""

    language: str
    doc_id: str
    sent_id: str
    tree: FreeTree
    source: str = ""

    @property
    def n(self) -> int:
        return self.tree.n

    @property
    def key(self) -> Tuple[str, str]:
        return (self.doc_id, self.sent_id)

    @property
    def arrangement(self) -> LinearArrangement:
        return LinearArrangement.identity(self.tree.n)


@dataclass
class Corpus:
    language: str
    sentences: List[Sentence] = field(default_factory=list)
    dataset: str = "UD"
    discarded: int = 0

    def __len__(self) -> int:
        return len(self.sentences)


class CorpusMeta(BaseModel):
    language: str
    family: str
    dataset: str
    N: int
    N1: int
    N2: int
    theta: float

    @model_validator(mode="after")
    def _theta_is_short_share(self) -> "CorpusMeta":
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError("theta must lie in [0, 1]")
        if self.N1 + self.N2 > self.N:
            raise ValueError("more short sentences than sentences")
        return self


# ============= PARSING =============

def _check_heads(heads: Sequence[int], line_no: int) -> None:
    roots = [i for i, h in enumerate(heads) if h == 0]
    if len(roots) > 1:
        raise MultipleRoots(f"sentence at line {line_no} has {len(roots)} roots")
    if not roots:
        raise NonTreeHeads(f"sentence at line {line_no} has no root")
    if any(h < 0 or h > len(heads) for h in heads):
        raise NonTreeHeads(f"sentence at line {line_no} has a head outside 1..{len(heads)}")
    try:
        from_head_vector(heads)
    except TreeError as e:
        raise NonTreeHeads(f"sentence at line {line_no}: heads do not form a tree ({e})") from e


def _validate_block(block: List[Tuple[int, str]]) -> None:
    """Column checks with line numbers, before handing the block to the conllu parser."""
    expected = 1
    for line_no, line in block:
        if line.startswith("#"):
            continue
        columns = line.split("\t")
        if len(columns) != CONLLU_COLUMNS:
            raise MalformedLine(line_no, f"expected {CONLLU_COLUMNS} tab-separated columns, found {len(columns)}")
        token_id, head = columns[0], columns[6]
        if _MULTIWORD.match(token_id) or _EMPTY_NODE.match(token_id):
            continue
        if not _INTEGER.match(token_id) or int(token_id) != expected:
            raise MalformedLine(line_no, f"token id {token_id!r} breaks the sequence 1..n")
        if not _INTEGER.match(head):
            raise MalformedLine(line_no, f"head {head!r} is not an integer")
        expected += 1


def _blocks(stream: Iterable[str]) -> Iterable[List[Tuple[int, str]]]:
    block: List[Tuple[int, str]] = []
    for line_no, line in enumerate(stream, start=1):
        line = line.rstrip("\r\n")
        if line.strip():
            block.append((line_no, line))
        elif block:
            yield block
            block = []
    if block:
        yield block


def parse_conllu(stream: Iterable[str]) -> List[RawSentence]:
    """
    Parse CoNLL-U text into raw sentences.

    Multiword-token ranges and empty nodes are skipped. Sentence ids come from
    "# sent_id" comments (running number otherwise); "# newdoc id" sets the
    document id of the sentences that follow.

    Raises:
        MalformedLine: wrong column count, broken id sequence or non-integer head
        MultipleRoots: more than one token with head 0
        NonTreeHeads: heads that do not form a tree
    """
    sentences: List[RawSentence] = []
    doc_id = ""
    for block in _blocks(stream):
        _validate_block(block)
        if all(line.startswith("#") for _, line in block):
            continue
        text = "\n".join(line for _, line in block) + "\n\n"
        try:
            token_list = conllu.parse(text)[0]
        except ParseException as e:
            raise MalformedLine(block[0][0], str(e)) from e

        metadata = token_list.metadata
        if "newdoc id" in metadata:
            doc_id = metadata["newdoc id"]
        tokens = [
            Token(
                id=tok["id"],
                form=tok["form"] or "",
                upos=tok["upos"] or "",
                head=tok["head"],
                deprel=tok["deprel"] or "",
            )
            for tok in token_list
            if isinstance(tok["id"], int)
        ]
        if not tokens:
            continue
        first_line = block[0][0]
        _check_heads([t.head for t in tokens], first_line)
        sentences.append(RawSentence(
            tokens=tokens,
            doc_id=doc_id,
            sent_id=metadata.get("sent_id", str(len(sentences) + 1)),
            has_forms=any(t.form not in ("", "_") for t in tokens),
            line_no=first_line,
        ))
    logger.debug(f"Parsed {len(sentences)} CoNLL-U sentences")
    return sentences


def parse_heads(stream: Iterable[str]) -> List[RawSentence]:
    """
    Parse stripped head vectors, one sentence per line ("2 0 2").

    Blank lines and "#" comments are ignored; the sentence id is the running number.
    """
    sentences: List[RawSentence] = []
    for line_no, line in enumerate(stream, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if not all(_INTEGER.match(f) for f in fields):
            raise MalformedLine(line_no, "head vectors hold non-negative integers only")
        heads = [int(f) for f in fields]
        _check_heads(heads, line_no)
        sentences.append(RawSentence(
            tokens=[Token(id=i + 1, form="", upos="", head=h) for i, h in enumerate(heads)],
            sent_id=str(len(sentences) + 1),
            has_forms=False,
            line_no=line_no,
        ))
    return sentences


# ============= PREPROCESSING =============

def _is_removed(token: Token, removed_upos: frozenset, null_forms: List[re.Pattern], has_forms: bool) -> bool:
    if token.upos in removed_upos:
        return True
    return has_forms and any(p.search(token.form) for p in null_forms)


def preprocess(
    s: RawSentence,
    removed_upos: Optional[Iterable[str]] = None,
    null_form_patterns: Optional[Sequence[str]] = None,
) -> FreeTree:
    """
    Delete punctuation and null elements, reattach orphans, renumber.

    A surviving token whose head was deleted hangs from its nearest surviving
    ancestor. If the root itself is deleted, the orphan with the smallest id
    becomes the root and the other orphans attach to it. No dummy root is added.

    Args:
        s: Raw sentence
        removed_upos: UPOS tags to delete (default PUNCT)
        null_form_patterns: Regexes on the form marking null elements

    Raises:
        AllTokensDeleted: nothing survives
    """
    removed = frozenset(config.REMOVED_UPOS if removed_upos is None else removed_upos)
    patterns = [re.compile(p) for p in (config.NULL_FORM_PATTERNS if null_form_patterns is None else null_form_patterns)]

    by_id = {t.id: t for t in s.tokens}
    survivors = [t.id for t in s.tokens if not _is_removed(t, removed, patterns, s.has_forms)]
    if not survivors:
        raise AllTokensDeleted(f"sentence {s.sent_id or s.line_no}: every token was removed")
    alive = set(survivors)
    index = {token_id: i for i, token_id in enumerate(survivors)}

    parent: Dict[int, Optional[int]] = {}
    for token_id in survivors:
        head = by_id[token_id].head
        while head != 0 and head not in alive:
            head = by_id[head].head
        parent[token_id] = head if head != 0 else None

    orphans = [token_id for token_id in survivors if parent[token_id] is None]
    root = orphans[0]
    edges = [(index[token_id], index[root]) for token_id in orphans[1:]]
    edges.extend(
        (index[token_id], index[head]) for token_id, head in parent.items() if head is not None
    )
    if len(orphans) > 1:
        logger.debug(f"sentence {s.sent_id}: root deleted, {len(orphans) - 1} orphans attached to token {root}")
    return build_tree(len(survivors), edges, root=index[root])


def to_sentences(
    raw: Sequence[RawSentence],
    language: str,
    source: str = "",
) -> Tuple[List[Sentence], int]:
    """Preprocess raw sentences, dropping those left empty. Returns (sentences, dropped)."""
    sentences = []
    dropped = 0
    for s in raw:
        try:
            tree = preprocess(s)
        except AllTokensDeleted as e:
            logger.warning(f"{source or language}: {e}")
            dropped += 1
            continue
        sentences.append(Sentence(language=language, doc_id=s.doc_id, sent_id=s.sent_id, tree=tree, source=source))
    return sentences, dropped


# ============= CORPORA =============

def language_from_path(argument: str) -> Tuple[str, str]:
    """
    Split a "LANG=PATH" input into (language, path).

    Without "=", the language is the file-name prefix before the first "_" or "-".
    """
    if "=" in argument:
        language, path = argument.split("=", 1)
        return language.strip(), path.strip()
    stem = Path(argument).name
    language = re.split(r"[_\-.]", stem, maxsplit=1)[0]
    return language, argument


def load_file(path: str, fmt: str, language: str) -> Tuple[List[Sentence], int]:
    """Read one treebank file in the given format ("conllu" or "heads") and preprocess it."""
    try:
        with open(path, encoding="utf-8") as stream:
            raw = parse_conllu(stream) if fmt == "conllu" else parse_heads(stream)
    except InputError as e:
        logger.error(f"{path}: {e}")
        raise
    return to_sentences(raw, language=language, source=str(path))


def _load_job(args) -> Tuple[List[Sentence], int]:
    path, fmt, language = args
    return load_file(path, fmt, language)


def load_corpora(
    inputs: Sequence[str],
    fmt: str = "conllu",
    dataset: str = "UD",
    workers: int = 1,
) -> Dict[str, Corpus]:
    """
    Load and merge every input per language.

    Files are read in parallel when workers > 1; merging follows file name order,
    then position within the file.
    """
    if fmt == "internal":
        corpora: Dict[str, Corpus] = {}
        for argument in sorted(inputs):
            _, path = language_from_path(argument)
            with open(path, encoding="utf-8") as stream:
                for language, corpus in read_internal(stream, dataset=dataset).items():
                    corpora.setdefault(language, Corpus(language=language, dataset=dataset)).sentences.extend(corpus.sentences)
        return dict(sorted(corpora.items()))

    jobs = sorted(
        ((path, fmt, language) for language, path in map(language_from_path, inputs)),
        key=lambda job: (Path(job[0]).name, job[0]),
    )
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            loaded = list(pool.map(_load_job, jobs))
    else:
        loaded = [_load_job(job) for job in jobs]

    per_language: Dict[str, List[Corpus]] = {}
    for (path, _, language), (sentences, dropped) in zip(jobs, loaded):
        per_language.setdefault(language, []).append(
            Corpus(language=language, sentences=sentences, dataset=dataset, discarded=dropped)
        )
        logger.info(f"Loaded {len(sentences)} sentences of {language} from {path}")
    return {language: merge_language(parts) for language, parts in sorted(per_language.items())}


def merge_language(treebanks: Sequence[Corpus]) -> Corpus:
    """
    Concatenate treebanks of one language in the given order. No deduplication.

    Raises:
        EmptyCorpus: no treebank given
        MixedLanguages: treebanks of different languages
    """
    if not treebanks:
        raise EmptyCorpus("nothing to merge")
    languages = {tb.language for tb in treebanks}
    if len(languages) > 1:
        raise MixedLanguages(f"cannot merge treebanks of {sorted(languages)}")
    merged = Corpus(language=treebanks[0].language, dataset=treebanks[0].dataset)
    for tb in treebanks:
        merged.sentences.extend(tb.sentences)
        merged.discarded += tb.discarded
    return merged


def reparallelize(collection: Dict[str, Corpus], min_length: int = 3) -> Dict[str, Corpus]:
    """
    Keep only the sentences with n >= min_length present in every language.

    Sentences are identified by (document id, sentence id); within a language the
    first occurrence wins and the original order is kept.

    Raises:
        NoCommonSentences: the intersection is empty
    """
    if not collection:
        raise EmptyCorpus("no languages to reparallelize")
    surviving: Dict[str, Dict[Tuple[str, str], Sentence]] = {}
    for language, corpus in collection.items():
        kept: Dict[Tuple[str, str], Sentence] = {}
        for s in corpus.sentences:
            if s.n >= min_length and s.key not in kept:
                kept[s.key] = s
        surviving[language] = kept

    common = set.intersection(*(set(kept) for kept in surviving.values()))
    if not common:
        raise NoCommonSentences("no sentence survives in every language")
    result = {}
    for language, corpus in collection.items():
        sentences = [s for key, s in surviving[language].items() if key in common]
        result[language] = Corpus(language=language, sentences=sentences, dataset=corpus.dataset)
    logger.info(f"Reparallelized {len(collection)} languages to {len(common)} sentences each")
    return result


def corpus_lengths(corpus: Corpus) -> Dict[int, int]:
    """N_n: number of sentences of each length."""
    return dict(sorted(Counter(s.n for s in corpus.sentences).items()))


def theta_stats(corpus: Corpus) -> CorpusMeta:
    """N, N1, N2 and theta = (N1 + N2)/N; theta is 0 for an empty corpus."""
    lengths = corpus_lengths(corpus)
    total = sum(lengths.values())
    n1, n2 = lengths.get(1, 0), lengths.get(2, 0)
    return CorpusMeta(
        language=corpus.language,
        family=config.get_family(corpus.language),
        dataset=corpus.dataset,
        N=total,
        N1=n1,
        N2=n2,
        theta=(n1 + n2) / total if total else 0.0,
    )


# ============= INTERNAL FORMAT =============

def write_internal(collection: Dict[str, Corpus], stream: TextIO) -> None:
    """One line per sentence: language, doc id, sent id and the head vector, tab separated."""
    stream.write(INTERNAL_HEADER + "\n")
    for language in sorted(collection):
        for s in collection[language].sentences:
            heads = " ".join(str(h) for h in to_head_vector(s.tree))
            stream.write(f"{language}\t{s.doc_id}\t{s.sent_id}\t{heads}\n")


def read_internal(stream: Iterable[str], dataset: str = "UD") -> Dict[str, Corpus]:
    """
    Read the internal corpus format back. Trees are not preprocessed again.

    Raises:
        MalformedLine: missing header or a line without four fields
    """
    corpora: Dict[str, Corpus] = {}
    lines = iter(enumerate(stream, start=1))
    first = next(lines, None)
    if first is None or first[1].rstrip("\r\n") != INTERNAL_HEADER:
        raise MalformedLine(1, f"expected header {INTERNAL_HEADER!r}")
    for line_no, line in lines:
        line = line.rstrip("\r\n")
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise MalformedLine(line_no, f"expected 4 tab-separated fields, found {len(fields)}")
        language, doc_id, sent_id, heads_text = fields
        try:
            heads = [int(h) for h in heads_text.split()]
        except ValueError as e:
            raise MalformedLine(line_no, "non-integer head") from e
        _check_heads(heads, line_no)
        corpus = corpora.setdefault(language, Corpus(language=language, dataset=dataset))
        corpus.sentences.append(Sentence(
            language=language,
            doc_id=doc_id,
            sent_id=sent_id,
            tree=from_head_vector(heads),
        ))
    return corpora

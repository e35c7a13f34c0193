"""Core data model for IRC argument-mining corpora.

A corpus is a list of documents; a document is an ordered list of
sentences; a sentence is an ordered list of tokens plus zero or more
non-overlapping typed argument spans (Issue, Reason, Conclusion).
Everything that is not covered by a span is NonIRC by convention.

All types are immutable after construction and safe to share across
threads; every operation in this module is a pure function of its
inputs.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass
from enum import Enum


class CorpusError(ValueError):
    """Malformed corpus data: bad file contents or violated invariants."""


class ArgLabel(Enum):
    """Argument-role type of a span or sentence. NonIRC marks unannotated text."""

    ISSUE = "Issue"
    REASON = "Reason"
    CONCLUSION = "Conclusion"
    NON_IRC = "NonIRC"

    @classmethod
    def from_name(cls, name: str) -> "ArgLabel":
        for label in cls:
            if label.value == name:
                return label
        raise CorpusError(f"unknown label {name!r}")


#: Labels that may appear on a span (NonIRC is the absence of a span).
SPAN_LABELS = (ArgLabel.ISSUE, ArgLabel.REASON, ArgLabel.CONCLUSION)

#: Fixed label order used for sentence-level tables and confusion matrices.
SENTENCE_LABELS = (ArgLabel.ISSUE, ArgLabel.REASON, ArgLabel.CONCLUSION, ArgLabel.NON_IRC)

DOCUMENT_KINDS = ("summary", "full_text")


@dataclass(frozen=True)
class Token:
    """A single word with character offsets into its source sentence."""

    text: str
    char_start: int
    char_end: int

    def __post_init__(self) -> None:
        if not self.text:
            raise CorpusError("token text must be non-empty")
        if any(c.isspace() for c in self.text):
            raise CorpusError(f"token text may not contain whitespace: {self.text!r}")
        if self.char_start < 0 or self.char_start >= self.char_end:
            raise CorpusError(
                f"bad token offsets ({self.char_start}, {self.char_end}) for {self.text!r}"
            )


@dataclass(frozen=True)
class LabeledSpan:
    """A typed argument span over an inclusive token index range."""

    label: ArgLabel
    start_token: int
    end_token: int

    def __post_init__(self) -> None:
        if self.label == ArgLabel.NON_IRC:
            raise CorpusError("spans may not carry the NonIRC label")
        if self.start_token < 0 or self.start_token > self.end_token:
            raise CorpusError(
                f"bad span bounds ({self.start_token}, {self.end_token})"
            )

    @property
    def length(self) -> int:
        return self.end_token - self.start_token + 1


def _check_spans(spans: tuple[LabeledSpan, ...], n_tokens: int, slot: str) -> None:
    for span in spans:
        if span.end_token >= n_tokens:
            raise CorpusError(
                f"{slot} span {span.label.value}({span.start_token}-{span.end_token}) "
                f"exceeds sentence length {n_tokens}"
            )
    for prev, cur in zip(spans, spans[1:]):
        if cur.start_token <= prev.end_token:
            raise CorpusError(
                f"overlapping {slot} spans: {prev.label.value}({prev.start_token}-{prev.end_token}) "
                f"and {cur.label.value}({cur.start_token}-{cur.end_token})"
            )


@dataclass(frozen=True)
class Sentence:
    """An ordered token sequence with gold spans and optional predictions.

    ``spans`` is the gold annotation. The ``pred_*`` slots hold model output:
    ``pred_tags`` keeps the raw per-token tag strings exactly as decoded by a
    tagger (they may be ill-formed at chunk boundaries), ``pred_spans`` the
    spans recovered from them under a repair policy.
    """

    tokens: tuple[Token, ...]
    spans: tuple[LabeledSpan, ...] = ()
    sentence_label: ArgLabel | None = None
    pred_tags: tuple[str, ...] | None = None
    pred_spans: tuple[LabeledSpan, ...] | None = None
    pred_label: ArgLabel | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(
            self, "spans", tuple(sorted(self.spans, key=lambda s: s.start_token))
        )
        if self.pred_tags is not None:
            object.__setattr__(self, "pred_tags", tuple(self.pred_tags))
        if self.pred_spans is not None:
            object.__setattr__(
                self,
                "pred_spans",
                tuple(sorted(self.pred_spans, key=lambda s: s.start_token)),
            )
        if not self.tokens:
            raise CorpusError("sentence must contain at least one token")
        for prev, cur in zip(self.tokens, self.tokens[1:]):
            if cur.char_start < prev.char_end:
                raise CorpusError(
                    f"token offsets not monotonic at {cur.text!r} "
                    f"({prev.char_end} > {cur.char_start})"
                )
        _check_spans(self.spans, len(self.tokens), "gold")
        if self.pred_spans is not None:
            _check_spans(self.pred_spans, len(self.tokens), "predicted")
        if self.pred_tags is not None and len(self.pred_tags) != len(self.tokens):
            raise CorpusError(
                f"predicted tags length {len(self.pred_tags)} != token count {len(self.tokens)}"
            )

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def text(self) -> str:
        return " ".join(t.text for t in self.tokens)


@dataclass(frozen=True)
class Document:
    """A summary or full-text decision as an ordered list of sentences."""

    doc_id: str
    kind: str
    sentences: tuple[Sentence, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "sentences", tuple(self.sentences))
        if not self.doc_id:
            raise CorpusError("doc_id must be non-empty")
        if self.kind not in DOCUMENT_KINDS:
            raise CorpusError(
                f"document kind must be one of {DOCUMENT_KINDS}, got {self.kind!r}"
            )

    @property
    def n_tokens(self) -> int:
        return sum(len(s) for s in self.sentences)


@dataclass(frozen=True)
class CorpusSplit:
    """Disjoint train/validation/test document-id sets."""

    train: frozenset[str]
    validation: frozenset[str]
    test: frozenset[str]
    seed: int

    def __post_init__(self) -> None:
        if (self.train & self.validation) or (self.train & self.test) or (
            self.validation & self.test
        ):
            raise CorpusError("split partitions must be pairwise disjoint")


def split_corpus(
    docs: list[Document],
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1),
    seed: int = 0,
) -> CorpusSplit:
    """Partition whole documents into train/validation/test sets.

    Sizes are floor-based on the ratios with the remainder assigned to
    train; the assignment is a seeded shuffle of the sorted id list, so a
    fixed (corpus, seed) pair always yields the same split.
    """
    if len(ratios) != 3:
        raise CorpusError("exactly three split ratios required")
    if any(r < 0 for r in ratios):
        raise CorpusError("split ratios must be non-negative")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise CorpusError(f"split ratios must sum to 1, got {sum(ratios)}")
    ids = [d.doc_id for d in docs]
    if len(set(ids)) != len(ids):
        raise CorpusError("duplicate doc_id in corpus")
    n_nonzero = sum(1 for r in ratios if r > 0)
    if len(ids) < n_nonzero:
        raise CorpusError(
            f"cannot populate {n_nonzero} partitions with {len(ids)} documents"
        )
    order = sorted(ids)
    random.Random(seed).shuffle(order)
    n = len(order)
    n_train = int(math.floor(n * ratios[0] + 1e-9))
    n_val = int(math.floor(n * ratios[1] + 1e-9))
    n_test = int(math.floor(n * ratios[2] + 1e-9))
    n_train += n - (n_train + n_val + n_test)
    return CorpusSplit(
        train=frozenset(order[:n_train]),
        validation=frozenset(order[n_train : n_train + n_val]),
        test=frozenset(order[n_train + n_val :]),
        seed=seed,
    )


def select_documents(docs: list[Document], ids: frozenset[str] | set[str]) -> list[Document]:
    """Return the subset of documents whose ids are in ``ids``, in corpus order."""
    return [d for d in docs if d.doc_id in ids]


@dataclass(frozen=True)
class LengthStats:
    """Per-label span length statistics, measured in tokens."""

    count: int
    min_len: int | None
    max_len: int | None
    mean_len: float | None


def corpus_stats(docs: list[Document]) -> dict[ArgLabel, LengthStats]:
    """Span length statistics per label. Empty label classes get count 0
    and absent (None) lengths rather than fabricated zeros."""
    lengths: dict[ArgLabel, list[int]] = {label: [] for label in SPAN_LABELS}
    for doc in docs:
        for sent in doc.sentences:
            for span in sent.spans:
                lengths[span.label].append(span.length)
    table: dict[ArgLabel, LengthStats] = {}
    for label in SPAN_LABELS:
        vals = lengths[label]
        if vals:
            table[label] = LengthStats(
                count=len(vals),
                min_len=min(vals),
                max_len=max(vals),
                mean_len=round(sum(vals) / len(vals), 2),
            )
        else:
            table[label] = LengthStats(count=0, min_len=None, max_len=None, mean_len=None)
    return table


def corpus_stats_by_kind(docs: list[Document]) -> dict[str, dict[ArgLabel, LengthStats]]:
    """Length statistics grouped by document kind (summary vs full text)."""
    return {
        kind: corpus_stats([d for d in docs if d.kind == kind])
        for kind in DOCUMENT_KINDS
        if any(d.kind == kind for d in docs)
    }


# --- raw-text ingestion -------------------------------------------------
#
# Gold corpora carry explicit sentence boundaries, so these rules only
# affect ingestion of unannotated plain text: sentences end at . ? !
# followed by whitespace and an uppercase letter (no abbreviation
# handling); tokens are whitespace runs with single leading/trailing
# punctuation characters peeled off into their own tokens.

_SENT_BOUNDARY = re.compile(r"(?<=[.?!])\s+(?=[A-Z])")


def segment_text(text: str) -> list[str]:
    return [part for part in _SENT_BOUNDARY.split(text) if part.strip()]


def tokenize_sentence(text: str) -> list[Token]:
    tokens: list[Token] = []
    for m in re.finditer(r"\S+", text):
        chunk, off = m.group(), m.start()
        lo, hi = 0, len(chunk)
        lead: list[Token] = []
        trail: list[Token] = []
        while lo < hi and not chunk[lo].isalnum():
            lead.append(Token(chunk[lo], off + lo, off + lo + 1))
            lo += 1
        while hi > lo and not chunk[hi - 1].isalnum():
            trail.append(Token(chunk[hi - 1], off + hi - 1, off + hi))
            hi -= 1
        tokens.extend(lead)
        if hi > lo:
            tokens.append(Token(chunk[lo:hi], off + lo, off + hi))
        tokens.extend(reversed(trail))
    return tokens


def document_from_text(doc_id: str, kind: str, text: str) -> Document:
    """Ingest unannotated plain text as an all-NonIRC document."""
    sentences = []
    for part in segment_text(text):
        toks = tokenize_sentence(part)
        if toks:
            sentences.append(Sentence(tokens=tuple(toks)))
    return Document(doc_id=doc_id, kind=kind, sentences=tuple(sentences))


def canonical_tokens(texts: list[str]) -> tuple[Token, ...]:
    """Tokens with canonical offsets: texts joined by single spaces."""
    out = []
    pos = 0
    for text in texts:
        out.append(Token(text, pos, pos + len(text)))
        pos += len(text) + 1
    return tuple(out)

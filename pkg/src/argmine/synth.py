"""Deterministic synthetic-corpus generator.

Stands in for the non-redistributable annotated corpus. Sentences follow
cue conventions that mirror how human-written legal summaries signal
their argument roles: Issue spans open with "whether"-style cues,
Conclusion spans with "HELD", Reason spans with causal cues. Span
interiors mix a per-label topical vocabulary with shared filler words,
the noise rate flips cue tokens to random vocabulary, and a mixed-rate
produces sentences carrying two typed spans. Everything is a pure
function of the config (seed included); generation is single-threaded on
purpose so corpora are reproducible byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .corpus import (
    ArgLabel,
    CorpusError,
    Document,
    LabeledSpan,
    Sentence,
    SPAN_LABELS,
    canonical_tokens,
)

# Embedded vocabulary, partitioned so label-topical pools and the shared
# filler pool stay disjoint: with topical_fraction 1 and noise 0 the word
# identity alone determines the tag (a linearly separable corpus).

SHARED_VOCAB = (
    "the", "a", "an", "of", "to", "in", "and", "on", "for", "with", "by",
    "at", "from", "as", "that", "this", "which", "was", "were", "is", "are",
    "be", "been", "has", "have", "had", "not", "no", "it", "its", "their",
    "his", "her", "they", "he", "she", "we", "may", "must", "shall", "will",
    "would", "could", "should", "can", "did", "does", "do", "other", "such",
    "any", "all", "each", "both", "more", "most", "some", "under", "over",
    "before", "after", "between", "during", "upon", "within", "without",
    "against", "case", "cases", "matter", "parties", "party", "per",
    "pursuant", "section", "subsection", "paragraph", "act", "regulation",
    "rule", "rules", "notice", "record", "records", "time", "year", "years",
    "day", "days", "part", "parts", "one", "two", "three", "first", "second",
    "third", "new", "given", "made", "taken", "set", "out", "into", "also",
    "where", "when", "here", "there", "however", "further", "above", "below",
)

ISSUE_VOCAB = (
    "question", "questions", "dispute", "disputed", "entitlement",
    "jurisdiction", "validity", "liability", "negligence", "interpretation",
    "construction", "applicability", "scope", "meaning", "definition",
    "breach", "duty", "standard", "threshold", "test", "requirement",
    "obligation", "rights", "remedy", "remedies", "damages", "causation",
    "foreseeability", "reasonableness", "limitation",
)

REASON_VOCAB = (
    "evidence", "testimony", "witness", "witnesses", "credibility",
    "findings", "finding", "facts", "factual", "analysis", "reasoning",
    "principle", "principles", "precedent", "authority", "authorities",
    "statute", "statutory", "context", "purpose", "intention", "legislature",
    "balance", "weighing", "factors", "circumstances", "consideration",
    "considerations", "material", "support",
)

CONCLUSION_VOCAB = (
    "appeal", "appeals", "dismissed", "allowed", "granted", "denied",
    "affirmed", "reversed", "overturned", "upheld", "quashed", "remitted",
    "ordered", "order", "judgment", "verdict", "conviction", "acquittal",
    "sentence", "costs", "awarded", "relief", "application", "motion",
    "petition", "claim", "claims", "cross-appeal", "disposition", "stay",
)

TOPICAL_VOCAB: dict[ArgLabel, tuple[str, ...]] = {
    ArgLabel.ISSUE: ISSUE_VOCAB,
    ArgLabel.REASON: REASON_VOCAB,
    ArgLabel.CONCLUSION: CONCLUSION_VOCAB,
}

DEFAULT_LEXICONS: dict[str, tuple[str, ...]] = {
    "Issue": ("whether", "Whether", "arguably"),
    "Reason": ("because", "since", "therefore"),
    "Conclusion": ("HELD", "Accordingly", "DECIDED"),
}


@dataclass(frozen=True)
class SynthConfig:
    """Generator knobs. ``label_proportions`` orders as
    (Issue, Reason, Conclusion, NonIRC) and must sum to 1."""

    n_docs: int = 100
    summary_fraction: float = 0.5
    label_proportions: tuple[float, float, float, float] = (0.12, 0.18, 0.12, 0.58)
    span_token_range: Mapping[str, tuple[int, int]] = field(
        default_factory=lambda: {
            "Issue": (4, 12),
            "Reason": (5, 14),
            "Conclusion": (3, 10),
        }
    )
    filler_token_range: tuple[int, int] = (4, 14)
    sentences_per_doc: tuple[int, int] = (8, 14)
    lexicons: Mapping[str, tuple[str, ...]] = field(
        default_factory=lambda: dict(DEFAULT_LEXICONS)
    )
    topical_fraction: float = 0.75
    mixed_rate: float = 0.0
    noise_rate: float = 0.0
    paired: bool = False
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_docs < 0:
            raise CorpusError("n_docs must be non-negative")
        if len(self.label_proportions) != 4:
            raise CorpusError("label_proportions needs four entries (I, R, C, NonIRC)")
        if any(p < 0 for p in self.label_proportions):
            raise CorpusError("label proportions must be non-negative")
        if abs(sum(self.label_proportions) - 1.0) > 1e-9:
            raise CorpusError(
                f"label proportions must sum to 1, got {sum(self.label_proportions)}"
            )
        if not 0.0 <= self.summary_fraction <= 1.0:
            raise CorpusError("summary_fraction must lie in [0, 1]")
        for rate, name in (
            (self.topical_fraction, "topical_fraction"),
            (self.mixed_rate, "mixed_rate"),
            (self.noise_rate, "noise_rate"),
        ):
            if not 0.0 <= rate <= 1.0:
                raise CorpusError(f"{name} must lie in [0, 1]")
        for label in SPAN_LABELS:
            if label.value not in self.span_token_range:
                raise CorpusError(f"span_token_range missing {label.value}")
            lo, hi = self.span_token_range[label.value]
            if lo < 1 or hi < lo:
                raise CorpusError(f"bad span range for {label.value}: ({lo}, {hi})")
            if not self.lexicons.get(label.value):
                raise CorpusError(f"lexicon missing for {label.value}")


def separable_config(**overrides) -> SynthConfig:
    """A config whose corpus is linearly separable by word identity:
    fully topical interiors, no noise, no mixed sentences."""
    params = dict(topical_fraction=1.0, noise_rate=0.0, mixed_rate=0.0)
    params.update(overrides)
    return SynthConfig(**params)


def _choice(rng: np.random.Generator, words: tuple[str, ...]) -> str:
    return words[int(rng.integers(0, len(words)))]


def _cue(rng: np.random.Generator, lexicon: tuple[str, ...]) -> str:
    # favor the primary cue so indicator rankings have a clear head
    if len(lexicon) == 1 or rng.random() < 0.8:
        return lexicon[0]
    return lexicon[1 + int(rng.integers(0, len(lexicon) - 1))]


def _span_words(
    rng: np.random.Generator, label: ArgLabel, length: int, config: SynthConfig
) -> list[str]:
    words = [_cue(rng, tuple(config.lexicons[label.value]))]
    topical = TOPICAL_VOCAB[label]
    for _ in range(length - 1):
        pool = topical if rng.random() < config.topical_fraction else SHARED_VOCAB
        words.append(_choice(rng, pool))
    return words


def _span_length(rng: np.random.Generator, label: ArgLabel, config: SynthConfig) -> int:
    lo, hi = config.span_token_range[label.value]
    return int(rng.integers(lo, hi + 1))


def _sample_label(rng: np.random.Generator, config: SynthConfig) -> ArgLabel:
    r = rng.random()
    acc = 0.0
    for label, p in zip(
        (*SPAN_LABELS, ArgLabel.NON_IRC), config.label_proportions
    ):
        acc += p
        if r < acc:
            return label
    return ArgLabel.NON_IRC


def _irc_weights(config: SynthConfig) -> list[float]:
    irc = config.label_proportions[:3]
    total = sum(irc)
    if total <= 0:
        return [1.0 / 3.0] * 3
    return [p / total for p in irc]


def _make_sentence(rng: np.random.Generator, config: SynthConfig) -> Sentence:
    label = _sample_label(rng, config)
    if label == ArgLabel.NON_IRC:
        lo, hi = config.filler_token_range
        words = [_choice(rng, SHARED_VOCAB) for _ in range(int(rng.integers(lo, hi + 1)))]
        return Sentence(tokens=canonical_tokens(words))

    labels = [label]
    if rng.random() < config.mixed_rate:
        weights = _irc_weights(config)
        others = [l for l in SPAN_LABELS if l != label]
        w = [weights[SPAN_LABELS.index(l)] for l in others]
        total = sum(w)
        second = others[0] if total <= 0 or rng.random() < w[0] / total else others[1]
        labels.append(second)

    words: list[str] = []
    spans: list[LabeledSpan] = []
    for span_label in labels:
        length = _span_length(rng, span_label, config)
        start = len(words)
        words.extend(_span_words(rng, span_label, length, config))
        spans.append(LabeledSpan(span_label, start, start + length - 1))
    return Sentence(tokens=canonical_tokens(words), spans=tuple(spans))


def _apply_noise(rng: np.random.Generator, sentence: Sentence, config: SynthConfig) -> Sentence:
    if config.noise_rate <= 0.0 or not sentence.spans:
        return sentence
    words = [t.text for t in sentence.tokens]
    changed = False
    for span in sentence.spans:  # cue tokens sit at span starts
        if rng.random() < config.noise_rate:
            words[span.start_token] = _choice(rng, SHARED_VOCAB)
            changed = True
    if not changed:
        return sentence
    return Sentence(tokens=canonical_tokens(words), spans=sentence.spans)


def _make_document(
    rng: np.random.Generator, doc_id: str, kind: str, config: SynthConfig
) -> Document:
    lo, hi = config.sentences_per_doc
    if kind == "full_text":
        lo, hi = 2 * lo, 2 * hi  # full texts run longer than summaries
    n_sentences = int(rng.integers(lo, hi + 1))
    sentences = [
        _apply_noise(rng, _make_sentence(rng, config), config)
        for _ in range(n_sentences)
    ]
    return Document(doc_id=doc_id, kind=kind, sentences=tuple(sentences))


def _paraphrase(rng: np.random.Generator, sentence: Sentence, dropout: float = 0.1) -> Sentence:
    """Light paraphrase by token dropout; span cue tokens are kept so the
    copy stays recognizably the same statement."""
    keep: list[int] = []
    cue_positions = {span.start_token for span in sentence.spans}
    for i in range(len(sentence.tokens)):
        if i in cue_positions or rng.random() >= dropout:
            keep.append(i)
    if not keep:
        keep = [0]
    words = [sentence.tokens[i].text for i in keep]
    remap = {old: new for new, old in enumerate(keep)}
    spans = []
    for span in sentence.spans:
        inside = [i for i in keep if span.start_token <= i <= span.end_token]
        if inside:
            spans.append(LabeledSpan(span.label, remap[inside[0]], remap[inside[-1]]))
    return Sentence(tokens=canonical_tokens(words), spans=tuple(spans))


def _make_pair(
    rng: np.random.Generator, base_id: str, config: SynthConfig
) -> tuple[Document, Document]:
    """A summary and a full text containing paraphrased copies of the
    summary's sentences interleaved with extra filler."""
    summary = _make_document(rng, f"{base_id}-summary", "summary", config)
    full_sentences: list[Sentence] = []
    for sentence in summary.sentences:
        for _ in range(int(rng.integers(0, 3))):
            lo, hi = config.filler_token_range
            words = [
                _choice(rng, SHARED_VOCAB)
                for _ in range(int(rng.integers(lo, hi + 1)))
            ]
            full_sentences.append(Sentence(tokens=canonical_tokens(words)))
        full_sentences.append(_paraphrase(rng, sentence))
    full = Document(f"{base_id}-full", "full_text", tuple(full_sentences))
    return summary, full


def generate(config: SynthConfig) -> list[Document]:
    """Generate a corpus; identical configs yield identical corpora."""
    rng = np.random.default_rng(config.seed)
    docs: list[Document] = []
    width = max(3, len(str(max(config.n_docs - 1, 0))))
    for i in range(config.n_docs):
        base_id = f"doc{i:0{width}d}"
        if config.paired:
            summary, full = _make_pair(rng, base_id, config)
            docs.append(summary)
            docs.append(full)
        else:
            kind = "summary" if rng.random() < config.summary_fraction else "full_text"
            docs.append(_make_document(rng, base_id, kind, config))
    return docs


def generate_pair(config: SynthConfig, base_id: str = "pair000") -> tuple[Document, Document]:
    """One aligned (summary, full text) pair for the projection pipeline."""
    rng = np.random.default_rng(config.seed)
    return _make_pair(rng, base_id, config)

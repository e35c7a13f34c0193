"""Summary-to-full-text sentence matching and label projection.

Reimplements the annotation protocol that labels full-text sentences by
finding the sentences most similar to already-annotated summary
sentences. Matching is purely lexical (jaccard over lowercased token
sets, or cosine over term-frequency vectors); stopwords are retained
because they carry contextual signal in this domain. The human "ignore
minor wording differences" judgment has no numeric analog, so threshold
and top_k are explicit, and the trace makes every decision auditable.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .aggregate import gold_sentence_label
from .corpus import ArgLabel, Document, Sentence

MEASURE_JACCARD = "jaccard"
MEASURE_TF_COSINE = "tf_cosine"
MEASURES = (MEASURE_JACCARD, MEASURE_TF_COSINE)


def similarity(
    sentence_a: Sentence, sentence_b: Sentence, measure: str = MEASURE_JACCARD
) -> float:
    """Symmetric lexical similarity in [0, 1]; two empty token multisets
    score 0 by definition."""
    if measure not in MEASURES:
        raise ValueError(f"unknown similarity measure {measure!r}")
    words_a = [t.text.lower() for t in sentence_a.tokens]
    words_b = [t.text.lower() for t in sentence_b.tokens]
    if measure == MEASURE_JACCARD:
        set_a, set_b = set(words_a), set(words_b)
        union = set_a | set_b
        if not union:
            return 0.0
        return len(set_a & set_b) / len(union)
    tf_a, tf_b = Counter(words_a), Counter(words_b)
    dot = sum(tf_a[w] * tf_b[w] for w in tf_a if w in tf_b)
    norm_a = math.sqrt(sum(c * c for c in tf_a.values()))
    norm_b = math.sqrt(sum(c * c for c in tf_b.values()))
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    return dot / (norm_a * norm_b)


@dataclass(frozen=True)
class AlignmentTraceEntry:
    """One scored (summary sentence, full-text sentence) pair."""

    summary_idx: int
    full_idx: int
    score: float
    label: ArgLabel
    accepted: bool


def project_labels(
    summary: Document,
    full_text: Document,
    threshold: float = 0.5,
    top_k: int = 3,
    measure: str = MEASURE_JACCARD,
) -> tuple[Document, list[AlignmentTraceEntry]]:
    """Propose labels for full-text sentences from labeled summary sentences.

    Every full-text sentence scoring at least ``threshold`` against a
    labeled summary sentence (up to ``top_k`` per summary sentence,
    highest first) is proposed for that sentence's label. Conflicting
    proposals resolve to the highest score, ties to the earlier summary
    sentence. The trace lists every candidate pair with its score and
    whether it won; no matches at all is a valid (empty) outcome.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must lie in [0, 1], got {threshold}")
    if top_k < 1:
        raise ValueError(f"top_k must be >= 1, got {top_k}")

    candidates: list[AlignmentTraceEntry] = []
    for s_idx, s_sent in enumerate(summary.sentences):
        label = gold_sentence_label(s_sent)
        if label == ArgLabel.NON_IRC:
            continue
        scored = []
        for f_idx, f_sent in enumerate(full_text.sentences):
            score = similarity(s_sent, f_sent, measure)
            if score >= threshold:
                scored.append((score, f_idx))
        scored.sort(key=lambda pair: (-pair[0], pair[1]))
        for score, f_idx in scored[:top_k]:
            candidates.append(
                AlignmentTraceEntry(s_idx, f_idx, score, label, accepted=False)
            )

    # resolve conflicts: per full-text sentence, highest score wins,
    # ties go to the earlier summary sentence
    best: dict[int, AlignmentTraceEntry] = {}
    for entry in candidates:
        cur = best.get(entry.full_idx)
        if cur is None or entry.score > cur.score or (
            entry.score == cur.score and entry.summary_idx < cur.summary_idx
        ):
            best[entry.full_idx] = entry

    trace = [
        AlignmentTraceEntry(
            c.summary_idx,
            c.full_idx,
            c.score,
            c.label,
            accepted=(best.get(c.full_idx) is c),
        )
        for c in candidates
    ]

    new_sentences = []
    for f_idx, sentence in enumerate(full_text.sentences):
        winner = best.get(f_idx)
        if winner is None:
            new_sentences.append(sentence)
        else:
            new_sentences.append(
                Sentence(
                    tokens=sentence.tokens,
                    spans=sentence.spans,
                    sentence_label=winner.label,
                    pred_tags=sentence.pred_tags,
                    pred_spans=sentence.pred_spans,
                    pred_label=sentence.pred_label,
                )
            )
    projected = Document(full_text.doc_id, full_text.kind, tuple(new_sentences))
    return projected, trace


def trace_to_records(trace: list[AlignmentTraceEntry]) -> list[dict]:
    return [
        {
            "summary_idx": e.summary_idx,
            "full_idx": e.full_idx,
            "score": e.score,
            "label": e.label.value,
            "accepted": e.accepted,
        }
        for e in trace
    ]

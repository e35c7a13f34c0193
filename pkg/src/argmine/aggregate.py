"""Sentence labels from token tags: the multi-granularity step.

A sentence's label is the label family (B/I prefixes stripped, O counting
as NonIRC) with the most tokens. Ties default to the family whose first
token occurs earliest in the sentence; ``prefer_non_o`` additionally
drops NonIRC from a tie against any span family before applying the
earliest-mention rule.
"""

from __future__ import annotations

from collections import Counter

from . import bio
from .corpus import ArgLabel, Document, Sentence

TIE_EARLIEST = "earliest"
TIE_PREFER_NON_O = "prefer_non_o"
TIE_RULES = (TIE_EARLIEST, TIE_PREFER_NON_O)


def tag_family(tag: str) -> ArgLabel:
    """Label family of one tag: B-X/I-X -> X, O -> NonIRC."""
    _, label = bio.split_tag(tag)
    return ArgLabel.NON_IRC if label is None else label


def sentence_label(
    tags: list[str] | tuple[str, ...], tie_rule: str = TIE_EARLIEST
) -> ArgLabel:
    """Most frequent label family among a sentence's token tags."""
    if not tags:
        raise ValueError("sentence_label requires at least one tag")
    if tie_rule not in TIE_RULES:
        raise ValueError(f"unknown tie rule {tie_rule!r}")
    counts: Counter[ArgLabel] = Counter()
    first_seen: dict[ArgLabel, int] = {}
    for i, tag in enumerate(tags):
        family = tag_family(tag)
        counts[family] += 1
        first_seen.setdefault(family, i)
    top = max(counts.values())
    tied = [family for family, c in counts.items() if c == top]
    if tie_rule == TIE_PREFER_NON_O and len(tied) > 1:
        non_o = [f for f in tied if f != ArgLabel.NON_IRC]
        if non_o:
            tied = non_o
    return min(tied, key=lambda f: first_seen[f])


def label_document(
    doc: Document, tie_rule: str = TIE_EARLIEST
) -> tuple[Document, dict[ArgLabel, int]]:
    """Attach a predicted sentence label to every sentence from its
    predicted tags; returns the relabeled document and per-label counts."""
    new_sentences: list[Sentence] = []
    counts: dict[ArgLabel, int] = {}
    for i, sentence in enumerate(doc.sentences):
        if sentence.pred_tags is None:
            raise ValueError(
                f"document {doc.doc_id!r} sentence {i} carries no predicted tags"
            )
        label = sentence_label(sentence.pred_tags, tie_rule)
        counts[label] = counts.get(label, 0) + 1
        new_sentences.append(
            Sentence(
                tokens=sentence.tokens,
                spans=sentence.spans,
                sentence_label=sentence.sentence_label,
                pred_tags=sentence.pred_tags,
                pred_spans=sentence.pred_spans,
                pred_label=label,
            )
        )
    return Document(doc.doc_id, doc.kind, tuple(new_sentences)), counts


def gold_sentence_label(sentence: Sentence, tie_rule: str = TIE_EARLIEST) -> ArgLabel:
    """Gold label of a sentence: the explicit annotation when present,
    otherwise the majority family of its encoded gold spans."""
    if sentence.sentence_label is not None:
        return sentence.sentence_label
    return sentence_label(bio.encode(sentence), tie_rule)


def pred_sentence_label(sentence: Sentence, tie_rule: str = TIE_EARLIEST) -> ArgLabel:
    """Predicted label: the attached one when present, else the majority
    family of the predicted tags."""
    if sentence.pred_label is not None:
        return sentence.pred_label
    if sentence.pred_tags is not None:
        return sentence_label(sentence.pred_tags, tie_rule)
    raise ValueError("sentence carries no predictions")

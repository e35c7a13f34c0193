"""Conversion between labeled spans and per-token BIO tag sequences.

The tag inventory is exactly seven strings; their order here is the
canonical order used everywhere (tagger weight matrices, confusion
matrices, tie-breaking):

    O, B-Issue, I-Issue, B-Reason, I-Reason, B-Conclusion, I-Conclusion

``decode`` accepts three policies for ill-formed input (an I-tag not
preceded by a same-label B/I tag): ``strict`` rejects, ``i_as_b`` opens a
new span at the orphan, ``i_drop`` treats the orphan as O. ``i_as_b`` is
the default for model output because a chunk may legitimately start
mid-span after windowed chunking; ``strict`` is reserved for gold data.
"""

from __future__ import annotations

from .corpus import ArgLabel, CorpusError, LabeledSpan, Sentence

TAG_O = "O"

TAGS: tuple[str, ...] = (
    "O",
    "B-Issue",
    "I-Issue",
    "B-Reason",
    "I-Reason",
    "B-Conclusion",
    "I-Conclusion",
)

TAG_INDEX: dict[str, int] = {t: i for i, t in enumerate(TAGS)}

REPAIR_STRICT = "strict"
REPAIR_I_AS_B = "i_as_b"
REPAIR_I_DROP = "i_drop"
REPAIR_POLICIES = (REPAIR_STRICT, REPAIR_I_AS_B, REPAIR_I_DROP)


class TagError(CorpusError):
    """Ill-formed tag sequence; ``index`` is the first offending position."""

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


def b_tag(label: ArgLabel) -> str:
    return f"B-{label.value}"


def i_tag(label: ArgLabel) -> str:
    return f"I-{label.value}"


def split_tag(tag: str) -> tuple[str, ArgLabel | None]:
    """Split a tag string into its (prefix, label) parts; O carries no label."""
    if tag == TAG_O:
        return TAG_O, None
    if tag not in TAG_INDEX:
        raise CorpusError(f"unknown tag {tag!r}")
    prefix, _, name = tag.partition("-")
    return prefix, ArgLabel.from_name(name)


def encode(sentence: Sentence) -> list[str]:
    """Per-token BIO tags for a sentence's gold spans.

    Span starts become B-label, remaining span tokens I-label, everything
    else O. Output is always well-formed; two abutting same-label spans
    produce an internal ...I-X, B-X... boundary so the encoding stays
    injective on span structure.
    """
    tags = [TAG_O] * len(sentence.tokens)
    for span in sentence.spans:
        assert all(t == TAG_O for t in tags[span.start_token : span.end_token + 1]), (
            "overlapping spans must be rejected upstream"
        )
        tags[span.start_token] = b_tag(span.label)
        for i in range(span.start_token + 1, span.end_token + 1):
            tags[i] = i_tag(span.label)
    return tags


def encode_spans(spans: tuple[LabeledSpan, ...] | list[LabeledSpan], n_tokens: int) -> list[str]:
    """Like :func:`encode` but over a bare span list of known length."""
    tags = [TAG_O] * n_tokens
    for span in sorted(spans, key=lambda s: s.start_token):
        tags[span.start_token] = b_tag(span.label)
        for i in range(span.start_token + 1, span.end_token + 1):
            tags[i] = i_tag(span.label)
    return tags


def decode(tags: list[str] | tuple[str, ...], repair: str = REPAIR_I_AS_B) -> list[LabeledSpan]:
    """Recover maximal spans from a tag sequence under a repair policy.

    The result is always a list of non-overlapping, in-bounds spans; only
    ``strict`` can fail, raising :class:`TagError` at the first orphan I-tag.
    """
    if repair not in REPAIR_POLICIES:
        raise CorpusError(f"unknown repair policy {repair!r}")
    spans: list[LabeledSpan] = []
    open_label: ArgLabel | None = None
    open_start = 0

    def close(end: int) -> None:
        nonlocal open_label
        if open_label is not None:
            spans.append(LabeledSpan(open_label, open_start, end))
            open_label = None

    for i, tag in enumerate(tags):
        prefix, label = split_tag(tag)
        if prefix == TAG_O:
            close(i - 1)
        elif prefix == "B":
            close(i - 1)
            open_label, open_start = label, i
        else:  # I-tag
            if open_label == label:
                continue
            # orphan: start of sequence, after O, or label mismatch
            if repair == REPAIR_STRICT:
                raise TagError(f"orphan {tag} at token {i}", index=i)
            close(i - 1)
            if repair == REPAIR_I_AS_B:
                open_label, open_start = label, i
            # i_drop: treat as O
    close(len(tags) - 1)
    return spans


def is_well_formed(tags: list[str] | tuple[str, ...]) -> tuple[bool, int | None]:
    """True iff every I-tag continues a same-label B/I tag; else the first
    violating index."""
    prev: str = TAG_O
    for i, tag in enumerate(tags):
        prefix, label = split_tag(tag)
        if prefix == "I":
            prev_prefix, prev_label = split_tag(prev)
            if prev_prefix == TAG_O or prev_label != label:
                return False, i
        prev = tag
    return True, None

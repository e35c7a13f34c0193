"""Fixed-width token windows over documents, with invertible provenance.

The default is a hard split every ``window`` tokens (windows are
disjoint, no overlap or stride). With ``align_sentences`` a chunk instead
ends at the last sentence boundary that fits; a single sentence longer
than the window is hard-split with a warning. Either way the chunks of a
document are contiguous, ordered, non-overlapping and jointly cover all
tokens, so predicted tags can be mapped back exactly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

from .corpus import Document, Token


@dataclass(frozen=True)
class Chunk:
    """A contiguous token window of one document.

    ``positions[i]`` is the (sentence index, token index within sentence)
    of chunk token ``i``; ``doc_token_start`` is its global token offset
    and ``doc_token_count`` the document's total token count, which lets
    feature extraction compute document-relative positions.
    """

    doc_id: str
    chunk_index: int
    tokens: tuple[Token, ...]
    positions: tuple[tuple[int, int], ...]
    doc_token_start: int
    doc_token_count: int
    tags: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if len(self.tokens) != len(self.positions):
            raise ValueError("chunk tokens and positions must align")
        if self.tags is not None and len(self.tags) != len(self.tokens):
            raise ValueError("chunk tags must cover every token")

    def __len__(self) -> int:
        return len(self.tokens)

    def with_tags(self, tags: list[str] | tuple[str, ...]) -> "Chunk":
        return replace(self, tags=tuple(tags))


def _flatten(doc: Document) -> tuple[list[Token], list[tuple[int, int]]]:
    tokens: list[Token] = []
    positions: list[tuple[int, int]] = []
    for s_idx, sentence in enumerate(doc.sentences):
        for t_idx, token in enumerate(sentence.tokens):
            tokens.append(token)
            positions.append((s_idx, t_idx))
    return tokens, positions


def chunk_document(
    doc: Document, window: int = 1024, align_sentences: bool = False
) -> list[Chunk]:
    """Segment a document into token windows of at most ``window`` tokens."""
    if window < 2:
        raise ValueError(f"window must be >= 2, got {window}")
    tokens, positions = _flatten(doc)
    total = len(tokens)

    bounds: list[tuple[int, int]] = []
    if not align_sentences:
        bounds = [(lo, min(lo + window, total)) for lo in range(0, total, window)]
    else:
        lo = 0
        cur = 0  # tokens accumulated since lo
        for sentence in doc.sentences:
            n = len(sentence.tokens)
            if n > window:
                if cur:
                    bounds.append((lo, lo + cur))
                    lo, cur = lo + cur, 0
                warnings.warn(
                    f"sentence of {n} tokens exceeds window {window} in "
                    f"document {doc.doc_id!r}; hard-splitting",
                    RuntimeWarning,
                    stacklevel=2,
                )
                for piece_lo in range(lo, lo + n, window):
                    bounds.append((piece_lo, min(piece_lo + window, lo + n)))
                lo += n
            elif cur + n > window:
                bounds.append((lo, lo + cur))
                lo, cur = lo + cur, n
            else:
                cur += n
        if cur:
            bounds.append((lo, lo + cur))

    return [
        Chunk(
            doc_id=doc.doc_id,
            chunk_index=i,
            tokens=tuple(tokens[lo:hi]),
            positions=tuple(positions[lo:hi]),
            doc_token_start=lo,
            doc_token_count=total,
        )
        for i, (lo, hi) in enumerate(bounds)
    ]


def unchunk_tags(doc: Document, chunks: list[Chunk]) -> list[list[str]]:
    """Reassemble per-chunk tags into per-sentence tag sequences.

    Validates that the chunks exactly cover the document; the result
    feeds span decoding with the ``i_as_b`` repair policy, which rejoins
    spans bisected by chunk boundaries.
    """
    _, positions = _flatten(doc)
    ordered = sorted(chunks, key=lambda c: c.doc_token_start)
    covered: list[tuple[int, int]] = []
    flat_tags: list[str] = []
    for chunk in ordered:
        if chunk.tags is None:
            raise ValueError(
                f"chunk {chunk.chunk_index} of document {doc.doc_id!r} carries no tags"
            )
        covered.extend(chunk.positions)
        flat_tags.extend(chunk.tags)
    if covered != positions:
        n = min(len(covered), len(positions))
        bad = next((i for i in range(n) if covered[i] != positions[i]), n)
        if bad < len(positions):
            s_idx, t_idx = positions[bad]
            raise ValueError(
                f"chunks do not cover document {doc.doc_id!r}: first uncovered "
                f"token is {bad} (sentence {s_idx}, token {t_idx})"
            )
        raise ValueError(
            f"chunks overrun document {doc.doc_id!r}: {len(covered)} chunk tokens "
            f"for {len(positions)} document tokens"
        )
    out: list[list[str]] = [[] for _ in doc.sentences]
    for (s_idx, _), tag in zip(positions, flat_tags):
        out[s_idx].append(tag)
    return out

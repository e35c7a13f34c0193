"""Sparse indicator features for tokens in context.

Extraction is deterministic and position-local: a feature set depends
only on the tokens within the context window, the token's position in
its sentence, and its relative position in the document. Feature names
are plain strings (no hashing), so trained weights stay inspectable.

The feature dictionary is built on the training set and frozen; unseen
test-time features are dropped (zero contribution).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chunking import Chunk

BOUNDARY = "<pad>"


@dataclass(frozen=True)
class FeatureConfig:
    """Template toggles. The lowercased word-identity template is the
    backbone and must stay enabled."""

    word_lower: bool = True
    word_case: bool = True
    affixes: bool = True
    affix_max: int = 3
    shape: bool = True
    all_caps: bool = True
    sentence_initial: bool = True
    context_window: int = 2
    position_bucket: bool = True

    def __post_init__(self) -> None:
        if not self.word_lower:
            raise ValueError("the word-identity template must stay enabled")
        if self.affix_max < 1:
            raise ValueError("affix_max must be >= 1")
        if self.context_window < 0:
            raise ValueError("context_window must be >= 0")


def word_shape(word: str) -> str:
    """Case/digit/punctuation pattern, e.g. HELD -> XXXX, s.23(1) -> x.99(9)."""
    out = []
    for ch in word:
        if ch.isupper():
            out.append("X")
        elif ch.islower():
            out.append("x")
        elif ch.isdigit():
            out.append("9")
        else:
            out.append(ch)
    return "".join(out)


def extract(chunk: Chunk, position: int, config: FeatureConfig) -> dict[str, float]:
    """Indicator features (all weight 1.0) for one token of a chunk.

    Context features use chunk-local neighbours; past either chunk edge
    they degrade to boundary-marker features, so a document's first token
    always sees boundary markers on its left.
    """
    if position < 0 or position >= len(chunk.tokens):
        raise ValueError(f"position {position} out of range for chunk of {len(chunk.tokens)}")
    word = chunk.tokens[position].text
    lower = word.lower()
    feats: dict[str, float] = {}

    feats[f"w={lower}"] = 1.0
    if config.word_case:
        feats[f"W={word}"] = 1.0
    if config.affixes:
        for k in range(1, config.affix_max + 1):
            if len(word) > k:
                feats[f"pre{k}={lower[:k]}"] = 1.0
                feats[f"suf{k}={lower[-k:]}"] = 1.0
    if config.shape:
        feats[f"shape={word_shape(word)}"] = 1.0
    if config.all_caps and word.isupper():
        feats["all_caps"] = 1.0
    if config.sentence_initial and chunk.positions[position][1] == 0:
        feats["sent_initial"] = 1.0
    for off in range(1, config.context_window + 1):
        left = position - off
        right = position + off
        lw = chunk.tokens[left].text.lower() if left >= 0 else BOUNDARY
        rw = chunk.tokens[right].text.lower() if right < len(chunk.tokens) else BOUNDARY
        feats[f"p{off}={lw}"] = 1.0
        feats[f"n{off}={rw}"] = 1.0
    if config.position_bucket and chunk.doc_token_count > 0:
        g = chunk.doc_token_start + position
        bucket = min(9, (10 * g) // chunk.doc_token_count)
        feats[f"bucket={bucket}"] = 1.0
    return feats


def build_feature_index(
    chunks: list[Chunk], config: FeatureConfig
) -> tuple[tuple[str, ...], dict[str, int]]:
    """Scan training chunks and freeze the feature-name -> column mapping.

    Names are assigned in first-encounter order, which is deterministic
    for a fixed corpus and config.
    """
    index: dict[str, int] = {}
    for chunk in chunks:
        for pos in range(len(chunk.tokens)):
            for name in extract(chunk, pos, config):
                if name not in index:
                    index[name] = len(index)
    return tuple(index.keys()), index


def chunk_csr(
    chunk: Chunk, config: FeatureConfig, index: dict[str, int]
) -> tuple[np.ndarray, np.ndarray]:
    """Active feature columns per token in CSR layout (indptr, indices).

    Features missing from the frozen dictionary are dropped.
    """
    indptr = np.zeros(len(chunk.tokens) + 1, dtype=np.int64)
    cols: list[int] = []
    for pos in range(len(chunk.tokens)):
        for name in extract(chunk, pos, config):
            col = index.get(name)
            if col is not None:
                cols.append(col)
        indptr[pos + 1] = len(cols)
    return indptr, np.asarray(cols, dtype=np.int64)

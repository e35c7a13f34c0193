"""Linear-chain sequence taggers over the 7-tag space.

Two trainers share one model shape (sparse emission weights plus tag
transition weights with separate start/stop vectors):

* an averaged structured perceptron, and
* a first-order CRF trained by mini-batch gradient descent on a
  class-weighted negative log-likelihood (the chain-rule per-token
  decomposition, each conditional term scaled by the gold tag's class
  weight) with optional L2 regularization.

Decoding is exact Viterbi; ties resolve to the lowest tag index in the
canonical tag order. Transition constraints (forbidding O -> I-X and
cross-label B/I transitions) are decode-time only: they mask the Viterbi
search space and never enter a training objective.
"""

from __future__ import annotations

import json
import struct
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from . import bio, kernels
from .aggregate import sentence_label
from .chunking import Chunk, chunk_document, unchunk_tags
from .corpus import Document, Sentence
from .features import FeatureConfig, build_feature_index, chunk_csr

N_TAGS = len(bio.TAGS)

ALGORITHM_PERCEPTRON = "perceptron"
ALGORITHM_CRF = "crf"


class ModelError(ValueError):
    """Invalid model state, training input, or model file."""


@dataclass(frozen=True)
class TrainConfig:
    algorithm: str = ALGORITHM_PERCEPTRON
    epochs: int = 10
    learning_rate: float = 0.1
    l2: float = 0.0
    class_weights: Mapping[str, float] | str = "inverse"
    seed: int = 0
    constrain_transitions: bool = False
    batch_size: int = 8

    def __post_init__(self) -> None:
        if self.algorithm not in (ALGORITHM_PERCEPTRON, ALGORITHM_CRF):
            raise ModelError(f"unknown algorithm {self.algorithm!r}")
        if self.epochs < 1:
            raise ModelError("epochs must be >= 1")
        if self.learning_rate <= 0:
            raise ModelError("learning rate must be positive")
        if self.l2 < 0:
            raise ModelError("l2 strength must be non-negative")
        if self.batch_size < 1:
            raise ModelError("batch size must be >= 1")
        if isinstance(self.class_weights, str):
            if self.class_weights not in ("inverse", "uniform"):
                raise ModelError(
                    f"class_weights must be 'inverse', 'uniform', or a mapping, "
                    f"got {self.class_weights!r}"
                )
        else:
            for tag, w in self.class_weights.items():
                if tag not in bio.TAG_INDEX:
                    raise ModelError(f"class weight for unknown tag {tag!r}")
                if w <= 0:
                    raise ModelError(f"class weight for {tag} must be positive, got {w}")


@dataclass
class TaggerModel:
    """Trained linear-chain model with its frozen feature dictionary."""

    tags: tuple[str, ...]
    feature_names: tuple[str, ...]
    feature_index: dict[str, int]
    emission: np.ndarray  # [n_features, n_tags]
    transition: np.ndarray  # [n_tags, n_tags]
    start: np.ndarray  # [n_tags]
    stop: np.ndarray  # [n_tags]
    feature_config: FeatureConfig
    train_config: TrainConfig
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.tags != bio.TAGS:
            raise ModelError("tag inventory must be the canonical 7-tag order")
        if self.emission.shape != (len(self.feature_names), N_TAGS):
            raise ModelError("emission matrix shape mismatch")
        for arr in (self.emission, self.transition, self.start, self.stop):
            if not np.all(np.isfinite(arr)):
                raise ModelError("model weights must be finite")


def transition_masks(constrain: bool) -> tuple[np.ndarray, np.ndarray]:
    """Start/transition masks for Viterbi. Constrained decoding excludes
    start -> I-X and any a -> I-X where a is not B-X or I-X; O -> O is
    always legal, so the search space never empties."""
    allowed_start = np.ones(N_TAGS, dtype=np.bool_)
    allowed_trans = np.ones((N_TAGS, N_TAGS), dtype=np.bool_)
    if constrain:
        for j, tag in enumerate(bio.TAGS):
            if tag.startswith("I-"):
                allowed_start[j] = False
                allowed_trans[:, j] = False
                allowed_trans[j - 1, j] = True  # B-X precedes I-X in tag order
                allowed_trans[j, j] = True
    return allowed_start, allowed_trans


def _csr(model: TaggerModel, chunk: Chunk) -> tuple[np.ndarray, np.ndarray]:
    return chunk_csr(chunk, model.feature_config, model.feature_index)


def _tags_to_ids(tags: list[str] | tuple[str, ...]) -> np.ndarray:
    return np.asarray([bio.TAG_INDEX[t] for t in tags], dtype=np.int64)


def score_path(model: TaggerModel, chunk: Chunk, tags: list[str] | tuple[str, ...]) -> float:
    """Linear-chain score of a tag sequence: emissions plus transitions
    including the start and stop terms."""
    if len(tags) != len(chunk.tokens):
        raise ModelError(
            f"tag sequence length {len(tags)} != chunk length {len(chunk.tokens)}"
        )
    ids = _tags_to_ids(tags)
    indptr, indices = _csr(model, chunk)
    emis = kernels.emissions(indptr, indices, model.emission)
    total = float(model.start[ids[0]] + model.stop[ids[-1]])
    for t in range(len(ids)):
        total += float(emis[t, ids[t]])
        if t > 0:
            total += float(model.transition[ids[t - 1], ids[t]])
    return total


def viterbi(model: TaggerModel, chunk: Chunk, constrain: bool = False) -> list[str]:
    """Highest-scoring tag sequence for a chunk."""
    if not chunk.tokens:
        raise ModelError("cannot decode an empty chunk")
    indptr, indices = _csr(model, chunk)
    emis = kernels.emissions(indptr, indices, model.emission)
    allowed_start, allowed_trans = transition_masks(constrain)
    path, _ = kernels.viterbi_path(
        emis, model.transition, model.start, model.stop, allowed_start, allowed_trans
    )
    return [bio.TAGS[i] for i in path]


def log_partition(model: TaggerModel, chunk: Chunk) -> float:
    """Log of the summed exponentiated scores over all tag sequences."""
    if not chunk.tokens:
        raise ModelError("cannot compute the partition of an empty chunk")
    indptr, indices = _csr(model, chunk)
    emis = kernels.emissions(indptr, indices, model.emission)
    return float(kernels.forward_logz(emis, model.transition, model.start, model.stop))


# --- training ------------------------------------------------------------


def make_training_chunks(
    docs: list[Document], window: int = 1024, align_sentences: bool = False
) -> list[Chunk]:
    """Chunk documents and attach gold tags from their encoded spans."""
    out: list[Chunk] = []
    for doc in docs:
        sent_tags = [bio.encode(s) for s in doc.sentences]
        for chunk in chunk_document(doc, window, align_sentences):
            tags = tuple(sent_tags[s][t] for s, t in chunk.positions)
            out.append(chunk.with_tags(tags))
    return out


def inverse_frequency_weights(chunks: list[Chunk]) -> dict[str, float]:
    """Class weights w_t = N_total / (K * N_t) from training-tag counts;
    tags absent from the training set get weight 1."""
    counts = {tag: 0 for tag in bio.TAGS}
    total = 0
    for chunk in chunks:
        for tag in chunk.tags or ():
            counts[tag] += 1
            total += 1
    return {
        tag: (total / (N_TAGS * n)) if n > 0 else 1.0 for tag, n in counts.items()
    }


def resolve_class_weights(
    setting: Mapping[str, float] | str, chunks: list[Chunk]
) -> dict[str, float]:
    if setting == "uniform":
        return {tag: 1.0 for tag in bio.TAGS}
    if setting == "inverse":
        return inverse_frequency_weights(chunks)
    weights = {tag: 1.0 for tag in bio.TAGS}
    weights.update(setting)
    return weights


def _class_weight_array(weights: dict[str, float]) -> np.ndarray:
    return np.asarray([weights[tag] for tag in bio.TAGS], dtype=np.float64)


def _check_training_chunks(chunks: list[Chunk]) -> None:
    if not chunks:
        raise ModelError("training requires at least one chunk")
    for chunk in chunks:
        if chunk.tags is None:
            raise ModelError(
                f"training chunk {chunk.chunk_index} of document "
                f"{chunk.doc_id!r} carries no gold tags"
            )
        # An orphan I-tag is legitimate only at chunk position 0 (a window
        # may open mid-span); anywhere else means corrupt gold data.
        tags = chunk.tags
        ok, idx = bio.is_well_formed(tags)
        if not ok and idx == 0:
            ok, idx = bio.is_well_formed(("B-" + tags[0][2:],) + tuple(tags[1:]))
        if not ok:
            raise ModelError(
                f"ill-formed gold tags at token {idx} of chunk "
                f"{chunk.chunk_index}, document {chunk.doc_id!r}"
            )


def train_perceptron(
    chunks: list[Chunk],
    config: TrainConfig,
    feature_config: FeatureConfig = FeatureConfig(),
) -> TaggerModel:
    """Averaged structured perceptron over gold-tagged chunks.

    Instances are shuffled every epoch by the seeded generator; the
    returned weights are the average over every (epoch, instance) step,
    which makes two runs with the same seed bit-identical.
    """
    _check_training_chunks(chunks)
    names, index = build_feature_index(chunks, feature_config)
    csrs = [chunk_csr(c, feature_config, index) for c in chunks]
    golds = [_tags_to_ids(c.tags) for c in chunks]
    weights = resolve_class_weights(config.class_weights, chunks)
    cw = _class_weight_array(weights)

    F = len(names)
    W = np.zeros((F, N_TAGS))
    T = np.zeros((N_TAGS, N_TAGS))
    s = np.zeros(N_TAGS)
    e = np.zeros(N_TAGS)
    uW = np.zeros((F, N_TAGS))
    uT = np.zeros((N_TAGS, N_TAGS))
    us = np.zeros(N_TAGS)
    ue = np.zeros(N_TAGS)

    rng = np.random.default_rng(config.seed)
    total = config.epochs * len(chunks)
    count = 0
    mistakes: list[int] = []
    for _ in range(config.epochs):
        epoch_mistakes = 0
        for i in rng.permutation(len(chunks)):
            indptr, indices = csrs[i]
            epoch_mistakes += kernels.perceptron_step(
                indptr, indices, W, T, s, e, uW, uT, us, ue,
                golds[i], cw, count, config.learning_rate,
            )
            count += 1
        mistakes.append(int(epoch_mistakes))

    return TaggerModel(
        tags=bio.TAGS,
        feature_names=names,
        feature_index=index,
        emission=W - uW / total,
        transition=T - uT / total,
        start=s - us / total,
        stop=e - ue / total,
        feature_config=feature_config,
        train_config=config,
        metadata={
            "algorithm": ALGORITHM_PERCEPTRON,
            "n_train_chunks": len(chunks),
            "class_weights": weights,
            "mislabeled_tokens_per_epoch": mistakes,
        },
    )


def train_crf(
    chunks: list[Chunk],
    config: TrainConfig,
    feature_config: FeatureConfig = FeatureConfig(),
) -> TaggerModel:
    """First-order CRF by mini-batch gradient descent with a fixed
    learning rate on the class-weighted NLL plus (l2/2)*||w||^2."""
    _check_training_chunks(chunks)
    names, index = build_feature_index(chunks, feature_config)
    csrs = [chunk_csr(c, feature_config, index) for c in chunks]
    golds = [_tags_to_ids(c.tags) for c in chunks]
    weights = resolve_class_weights(config.class_weights, chunks)
    cw = _class_weight_array(weights)

    F = len(names)
    n_chunks = len(chunks)
    W = np.zeros((F, N_TAGS))
    T = np.zeros((N_TAGS, N_TAGS))
    s = np.zeros(N_TAGS)
    e = np.zeros(N_TAGS)
    dW = np.zeros((F, N_TAGS))
    dT = np.zeros((N_TAGS, N_TAGS))
    ds = np.zeros(N_TAGS)
    de = np.zeros(N_TAGS)

    rng = np.random.default_rng(config.seed)
    lr = config.learning_rate
    epoch_losses: list[float] = []
    for _ in range(config.epochs):
        order = rng.permutation(n_chunks)
        data_loss = 0.0
        for lo in range(0, n_chunks, config.batch_size):
            batch = order[lo : lo + config.batch_size]
            dW.fill(0.0)
            dT.fill(0.0)
            ds.fill(0.0)
            de.fill(0.0)
            for i in batch:
                indptr, indices = csrs[i]
                loss = kernels.crf_chunk_grad(
                    indptr, indices, W, T, s, e, golds[i], cw, dW, dT, ds, de
                )
                if not np.isfinite(loss):
                    raise ModelError(
                        f"non-finite loss on chunk {chunks[i].chunk_index} of "
                        f"document {chunks[i].doc_id!r}"
                    )
                data_loss += loss
            lam = config.l2 * (len(batch) / n_chunks)
            W -= lr * (dW + lam * W)
            T -= lr * (dT + lam * T)
            s -= lr * (ds + lam * s)
            e -= lr * (de + lam * e)
        epoch_losses.append(float(data_loss))

    return TaggerModel(
        tags=bio.TAGS,
        feature_names=names,
        feature_index=index,
        emission=W,
        transition=T,
        start=s,
        stop=e,
        feature_config=feature_config,
        train_config=config,
        metadata={
            "algorithm": ALGORITHM_CRF,
            "n_train_chunks": len(chunks),
            "class_weights": weights,
            "data_loss_per_epoch": epoch_losses,
        },
    )


def train_tagger(
    chunks: list[Chunk],
    config: TrainConfig,
    feature_config: FeatureConfig = FeatureConfig(),
) -> TaggerModel:
    if config.algorithm == ALGORITHM_CRF:
        return train_crf(chunks, config, feature_config)
    return train_perceptron(chunks, config, feature_config)


# --- prediction ----------------------------------------------------------


def predict_document(
    model: TaggerModel,
    doc: Document,
    window: int = 1024,
    align_sentences: bool = False,
    repair: str = bio.REPAIR_I_AS_B,
    constrain: bool | None = None,
) -> Document:
    """Tag a document: chunk, Viterbi per chunk, reassemble, repair.

    Predictions are attached to a fresh document (raw tags, repaired
    spans, majority sentence label); gold annotations are untouched.
    """
    if constrain is None:
        constrain = model.train_config.constrain_transitions
    if not doc.sentences:
        return doc
    chunks = chunk_document(doc, window, align_sentences)
    tagged = [c.with_tags(viterbi(model, c, constrain)) for c in chunks]
    sent_tags = unchunk_tags(doc, tagged)
    new_sentences: list[Sentence] = []
    for sentence, tags in zip(doc.sentences, sent_tags):
        spans = bio.decode(tags, repair)
        new_sentences.append(
            Sentence(
                tokens=sentence.tokens,
                spans=sentence.spans,
                sentence_label=sentence.sentence_label,
                pred_tags=tuple(tags),
                pred_spans=tuple(spans),
                pred_label=sentence_label(tags),
            )
        )
    return Document(doc.doc_id, doc.kind, tuple(new_sentences))


# --- model file ----------------------------------------------------------
#
# Single-file container, format version 1:
#
#   bytes 0..7    magic b"ARGMINE1"
#   bytes 8..11   header length H, unsigned 32-bit little-endian
#   bytes 12..    H bytes of UTF-8 JSON header
#   then          the arrays named in header["arrays"], in order,
#                 C-contiguous little-endian float64 ("<f8")
#
# The header stores the tag order, feature names, feature/train configs,
# training metadata, and each array's shape.

_MAGIC = b"ARGMINE1"
_DTYPE = "<f8"


def save_model(model: TaggerModel, path: str | Path) -> None:
    arrays = [
        ("emission", model.emission),
        ("transition", model.transition),
        ("start", model.start),
        ("stop", model.stop),
    ]
    train_config = asdict(model.train_config)
    if not isinstance(train_config["class_weights"], str):
        train_config["class_weights"] = dict(train_config["class_weights"])
    header = {
        "format_version": 1,
        "dtype": _DTYPE,
        "tags": list(model.tags),
        "feature_names": list(model.feature_names),
        "feature_config": asdict(model.feature_config),
        "train_config": train_config,
        "metadata": model.metadata,
        "arrays": [[name, list(arr.shape)] for name, arr in arrays],
    }
    blob = json.dumps(header, ensure_ascii=False).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for _, arr in arrays:
            fh.write(np.ascontiguousarray(arr, dtype=_DTYPE).tobytes())


def load_model(path: str | Path) -> TaggerModel:
    with open(path, "rb") as fh:
        magic = fh.read(len(_MAGIC))
        if magic != _MAGIC:
            raise ModelError(f"{path}: not a model file (bad magic)")
        (hlen,) = struct.unpack("<I", fh.read(4))
        header = json.loads(fh.read(hlen).decode("utf-8"))
        if header.get("format_version") != 1:
            raise ModelError(
                f"{path}: unsupported model format version {header.get('format_version')}"
            )
        arrays: dict[str, np.ndarray] = {}
        for name, shape in header["arrays"]:
            n_items = int(np.prod(shape)) if shape else 1
            buf = fh.read(n_items * 8)
            if len(buf) != n_items * 8:
                raise ModelError(f"{path}: truncated array {name!r}")
            arrays[name] = np.frombuffer(buf, dtype=_DTYPE).astype(
                np.float64
            ).reshape(shape)
    names = tuple(header["feature_names"])
    return TaggerModel(
        tags=tuple(header["tags"]),
        feature_names=names,
        feature_index={name: i for i, name in enumerate(names)},
        emission=arrays["emission"],
        transition=arrays["transition"],
        start=arrays["start"],
        stop=arrays["stop"],
        feature_config=FeatureConfig(**header["feature_config"]),
        train_config=TrainConfig(**header["train_config"]),
        metadata=header["metadata"],
    )

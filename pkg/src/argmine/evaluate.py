"""Measurement: P/R/F1 tables, confusion matrices, Cohen's kappa,
indicator-token reports, and the sentence-level comparison baseline.

Conventions, fixed so golden-file tests stay byte-stable:

* All counts are corpus-level micro counts (pooled over documents); the
  report header states this.
* Zero-denominator precision/recall is reported as 0.0 with its support
  visible; a class absent from both gold and prediction is marked absent
  (None) rather than given a fabricated 0.
* Confusion rows are true classes; row percentages are out of 100 and
  each nonzero row sums to 100. Empty gold rows are absent, not 0/0.
* Table rows follow the canonical tag order and the Issue, Reason,
  Conclusion, NonIRC sentence order; floats render with 4 decimals.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import bio
from .aggregate import gold_sentence_label, pred_sentence_label
from .corpus import ArgLabel, Document, SENTENCE_LABELS


class EvaluationError(ValueError):
    """Misaligned or malformed evaluation inputs."""


@dataclass(frozen=True)
class MetricsRow:
    """One-vs-rest metrics for a single class.

    ``support`` counts gold occurrences, ``predicted`` predicted ones.
    Metrics are None when the class occurs in neither.
    """

    precision: float | None
    recall: float | None
    f1: float | None
    support: int
    predicted: int


def _row(tp: int, support: int, predicted: int) -> MetricsRow:
    if support == 0 and predicted == 0:
        return MetricsRow(None, None, None, 0, 0)
    precision = tp / predicted if predicted > 0 else 0.0
    recall = tp / support if support > 0 else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return MetricsRow(precision, recall, f1, support, predicted)


def classification_table(gold, pred, classes) -> dict:
    """Per-class one-vs-rest precision/recall/F1 over aligned label lists."""
    if len(gold) != len(pred):
        raise EvaluationError(
            f"gold and predicted lengths differ: {len(gold)} != {len(pred)}"
        )
    known = set(classes)
    for seq, side in ((gold, "gold"), (pred, "predicted")):
        for lab in seq:
            if lab not in known:
                raise EvaluationError(f"unknown {side} class {lab!r}")
    table = {}
    for cls in classes:
        tp = sum(1 for g, p in zip(gold, pred) if g == cls and p == cls)
        support = sum(1 for g in gold if g == cls)
        predicted = sum(1 for p in pred if p == cls)
        table[cls] = _row(tp, support, predicted)
    return table


def macro_f1(table: dict, classes=None) -> float | None:
    """Mean F1 over the given classes (default: all non-absent rows)."""
    if classes is None:
        rows = [r for r in table.values() if r.f1 is not None]
    else:
        rows = [table[c] for c in classes]
    vals = [r.f1 if r.f1 is not None else 0.0 for r in rows]
    return sum(vals) / len(vals) if vals else None


def token_metrics(gold_tags, pred_tags) -> dict[str, MetricsRow]:
    """Per-tag table over the 7 BIO tags for token-aligned sequences."""
    return classification_table(list(gold_tags), list(pred_tags), bio.TAGS)


def sentence_metrics(gold_labels, pred_labels) -> dict[ArgLabel, MetricsRow]:
    """Per-type table over Issue/Reason/Conclusion/NonIRC sentence labels."""
    return classification_table(list(gold_labels), list(pred_labels), SENTENCE_LABELS)


def confusion(gold, pred, classes) -> tuple[np.ndarray, list[list[float] | None]]:
    """Counts matrix (row = true class) and row-percentage matrix.

    Percentage rows for empty gold classes are None (absent), never 0/0.
    """
    if len(gold) != len(pred):
        raise EvaluationError(
            f"gold and predicted lengths differ: {len(gold)} != {len(pred)}"
        )
    index = {cls: i for i, cls in enumerate(classes)}
    counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for g, p in zip(gold, pred):
        if g not in index:
            raise EvaluationError(f"unknown gold class {g!r}")
        if p not in index:
            raise EvaluationError(f"unknown predicted class {p!r}")
        counts[index[g], index[p]] += 1
    percent: list[list[float] | None] = []
    for i in range(len(classes)):
        total = int(counts[i].sum())
        if total == 0:
            percent.append(None)
        else:
            percent.append([100.0 * int(c) / total for c in counts[i]])
    return counts, percent


def cohens_kappa(labels_a, labels_b) -> float:
    """Chance-corrected agreement (p_o - p_e) / (1 - p_e)."""
    if len(labels_a) != len(labels_b):
        raise EvaluationError(
            f"label sequences differ in length: {len(labels_a)} != {len(labels_b)}"
        )
    n = len(labels_a)
    if n == 0:
        raise EvaluationError("kappa requires at least one label pair")
    p_o = sum(1 for a, b in zip(labels_a, labels_b) if a == b) / n
    counts_a = Counter(labels_a)
    counts_b = Counter(labels_b)
    p_e = sum(counts_a[c] * counts_b.get(c, 0) for c in counts_a) / (n * n)
    if p_e == 1.0:
        return 1.0
    return (p_o - p_e) / (1.0 - p_e)


# --- corpus-level reporting ----------------------------------------------


def _check_aligned(gold_docs: list[Document], pred_docs: list[Document]) -> None:
    if len(gold_docs) != len(pred_docs):
        raise EvaluationError(
            f"corpora differ in document count: {len(gold_docs)} != {len(pred_docs)}"
        )
    for g, p in zip(gold_docs, pred_docs):
        if g.doc_id != p.doc_id:
            raise EvaluationError(f"document order mismatch: {g.doc_id!r} vs {p.doc_id!r}")
        if len(g.sentences) != len(p.sentences):
            raise EvaluationError(
                f"document {g.doc_id!r}: sentence counts differ "
                f"({len(g.sentences)} != {len(p.sentences)})"
            )
        for i, (gs, ps) in enumerate(zip(g.sentences, p.sentences)):
            if len(gs.tokens) != len(ps.tokens):
                raise EvaluationError(
                    f"document {g.doc_id!r} sentence {i}: token counts differ "
                    f"({len(gs.tokens)} != {len(ps.tokens)})"
                )


def _gold_tags(sentence) -> list[str]:
    return bio.encode(sentence)


def _pred_tags(sentence) -> list[str]:
    if sentence.pred_tags is not None:
        return list(sentence.pred_tags)
    if sentence.pred_spans is not None:
        return bio.encode_spans(sentence.pred_spans, len(sentence.tokens))
    # A gold-style corpus offered as the prediction side (e.g. comparing
    # two annotators) contributes its gold tags.
    return bio.encode(sentence)


def flatten_tags(
    gold_docs: list[Document], pred_docs: list[Document]
) -> tuple[list[str], list[str]]:
    """Token-aligned (gold, predicted) tag lists pooled over the corpus."""
    _check_aligned(gold_docs, pred_docs)
    gold: list[str] = []
    pred: list[str] = []
    for g_doc, p_doc in zip(gold_docs, pred_docs):
        for g_sent, p_sent in zip(g_doc.sentences, p_doc.sentences):
            gold.extend(_gold_tags(g_sent))
            pred.extend(_pred_tags(p_sent))
    return gold, pred


def flatten_sentence_labels(
    gold_docs: list[Document], pred_docs: list[Document], tie_rule: str = "earliest"
) -> tuple[list[ArgLabel], list[ArgLabel]]:
    """Aligned (gold, predicted) sentence labels pooled over the corpus."""
    _check_aligned(gold_docs, pred_docs)
    gold: list[ArgLabel] = []
    pred: list[ArgLabel] = []
    for g_doc, p_doc in zip(gold_docs, pred_docs):
        for g_sent, p_sent in zip(g_doc.sentences, p_doc.sentences):
            gold.append(gold_sentence_label(g_sent, tie_rule))
            if p_sent.pred_tags is None and p_sent.pred_label is None:
                pred.append(gold_sentence_label(p_sent, tie_rule))
            else:
                pred.append(pred_sentence_label(p_sent, tie_rule))
    return gold, pred


def span_exact_metrics(
    gold_docs: list[Document], pred_docs: list[Document]
) -> MetricsRow:
    """Supplementary span-level score: a predicted span counts as correct
    only on exact (label, start, end) match within its sentence."""
    _check_aligned(gold_docs, pred_docs)
    tp = support = predicted = 0
    for g_doc, p_doc in zip(gold_docs, pred_docs):
        for g_sent, p_sent in zip(g_doc.sentences, p_doc.sentences):
            gold_spans = set(g_sent.spans)
            pred_spans = set(p_sent.pred_spans or ())
            tp += len(gold_spans & pred_spans)
            support += len(gold_spans)
            predicted += len(pred_spans)
    return _row(tp, support, predicted)


@dataclass(frozen=True)
class EvalReport:
    """Everything measured for one gold/predicted corpus pair."""

    token_table: dict[str, MetricsRow]
    token_macro_f1: float | None
    token_macro_f1_bi: float | None
    token_accuracy: float | None
    token_confusion: np.ndarray
    token_confusion_percent: list[list[float] | None]
    sentence_table: dict[ArgLabel, MetricsRow]
    sentence_macro_f1: float | None
    sentence_confusion: np.ndarray
    sentence_confusion_percent: list[list[float] | None]
    span_exact: MetricsRow
    kappa: float | None
    n_tokens: int
    n_sentences: int


BI_TAGS = tuple(t for t in bio.TAGS if t != bio.TAG_O)


def build_report(
    gold_docs: list[Document],
    pred_docs: list[Document],
    tie_rule: str = "earliest",
    with_kappa: bool = True,
) -> EvalReport:
    gold_tags, pred_tags = flatten_tags(gold_docs, pred_docs)
    gold_labels, pred_labels = flatten_sentence_labels(gold_docs, pred_docs, tie_rule)
    token_table = token_metrics(gold_tags, pred_tags)
    sentence_table = sentence_metrics(gold_labels, pred_labels)
    token_conf, token_pct = confusion(gold_tags, pred_tags, bio.TAGS)
    sent_conf, sent_pct = confusion(gold_labels, pred_labels, SENTENCE_LABELS)
    n_tokens = len(gold_tags)
    accuracy = float(np.trace(token_conf)) / n_tokens if n_tokens else None
    return EvalReport(
        token_table=token_table,
        token_macro_f1=macro_f1(token_table),
        token_macro_f1_bi=macro_f1(token_table, BI_TAGS),
        token_accuracy=accuracy,
        token_confusion=token_conf,
        token_confusion_percent=token_pct,
        sentence_table=sentence_table,
        sentence_macro_f1=macro_f1(sentence_table),
        sentence_confusion=sent_conf,
        sentence_confusion_percent=sent_pct,
        span_exact=span_exact_metrics(gold_docs, pred_docs),
        kappa=cohens_kappa(gold_labels, pred_labels) if with_kappa and gold_labels else None,
        n_tokens=n_tokens,
        n_sentences=len(gold_labels),
    )


# --- serialization -------------------------------------------------------

_HEADER_NOTE = "counts are corpus-level micro counts pooled over documents"


def _row_record(row: MetricsRow) -> dict:
    return {
        "precision": row.precision,
        "recall": row.recall,
        "f1": row.f1,
        "support": row.support,
        "predicted": row.predicted,
    }


def report_to_record(report: EvalReport) -> dict:
    """JSON-ready dict with a fixed key order."""
    return {
        "note": _HEADER_NOTE,
        "n_tokens": report.n_tokens,
        "n_sentences": report.n_sentences,
        "token": {
            "per_tag": {tag: _row_record(report.token_table[tag]) for tag in bio.TAGS},
            "macro_f1": report.token_macro_f1,
            "macro_f1_bi": report.token_macro_f1_bi,
            "accuracy": report.token_accuracy,
            "confusion_counts": report.token_confusion.tolist(),
            "confusion_row_percent": report.token_confusion_percent,
            "classes": list(bio.TAGS),
        },
        "sentence": {
            "per_type": {
                label.value: _row_record(report.sentence_table[label])
                for label in SENTENCE_LABELS
            },
            "macro_f1": report.sentence_macro_f1,
            "confusion_counts": report.sentence_confusion.tolist(),
            "confusion_row_percent": report.sentence_confusion_percent,
            "classes": [label.value for label in SENTENCE_LABELS],
            "kappa": report.kappa,
        },
        "span_exact": _row_record(report.span_exact),
    }


def _fmt(x: float | None) -> str:
    return "  absent" if x is None else f"{x:8.4f}"


def _render_table(names: list[str], rows: list[MetricsRow]) -> list[str]:
    width = max(len(n) for n in names)
    out = [
        f"{'class':<{width}}  {'precision':>9}  {'recall':>8}  {'f1':>8}  {'support':>7}"
    ]
    for name, row in zip(names, rows):
        out.append(
            f"{name:<{width}}  {_fmt(row.precision):>9}  {_fmt(row.recall):>8}  "
            f"{_fmt(row.f1):>8}  {row.support:>7d}"
        )
    return out


def _render_confusion(names: list[str], counts: np.ndarray, percent) -> list[str]:
    width = max(max(len(n) for n in names), 9)
    head = "  ".join(f"{n:>{width}}" for n in names)
    corner = "true\\pred"
    out = [f"{corner:>{width}}  {head}"]
    for i, name in enumerate(names):
        cells = "  ".join(f"{int(c):>{width}d}" for c in counts[i])
        out.append(f"{name:>{width}}  {cells}")
    out.append("row %:")
    for i, name in enumerate(names):
        if percent[i] is None:
            out.append(f"{name:>{width}}  (absent)")
        else:
            cells = "  ".join(f"{p:>{width}.2f}" for p in percent[i])
            out.append(f"{name:>{width}}  {cells}")
    return out


def report_to_text(report: EvalReport) -> str:
    """Human-readable aligned tables; fixed order and formatting."""
    lines: list[str] = [f"evaluation report ({_HEADER_NOTE})", ""]
    lines.append(f"tokens: {report.n_tokens}   sentences: {report.n_sentences}")
    lines.append("")
    lines.append("token-level (7 tags)")
    lines.extend(_render_table(list(bio.TAGS), [report.token_table[t] for t in bio.TAGS]))
    lines.append(f"macro F1: {_fmt(report.token_macro_f1).strip()}")
    lines.append(f"macro F1 (B/I tags): {_fmt(report.token_macro_f1_bi).strip()}")
    lines.append(f"accuracy: {_fmt(report.token_accuracy).strip()}")
    lines.append("")
    lines.append("token confusion")
    lines.extend(
        _render_confusion(list(bio.TAGS), report.token_confusion, report.token_confusion_percent)
    )
    lines.append("")
    lines.append("sentence-level (4 types)")
    sent_names = [label.value for label in SENTENCE_LABELS]
    lines.extend(
        _render_table(sent_names, [report.sentence_table[label] for label in SENTENCE_LABELS])
    )
    lines.append(f"macro F1: {_fmt(report.sentence_macro_f1).strip()}")
    if report.kappa is not None:
        lines.append(f"kappa (gold vs predicted labels): {report.kappa:.4f}")
    lines.append("")
    lines.append("sentence confusion")
    lines.extend(
        _render_confusion(sent_names, report.sentence_confusion, report.sentence_confusion_percent)
    )
    lines.append("")
    lines.append("span exact match (supplementary)")
    lines.extend(_render_table(["spans"], [report.span_exact]))
    return "\n".join(lines) + "\n"


# --- indicator tokens -----------------------------------------------------


def indicator_report(
    docs: list[Document], k: int = 10
) -> dict[str, list[tuple[str, int]]]:
    """Top-k surface forms among correctly predicted tokens, per tag.

    ``docs`` must carry both gold spans and predicted tags. Ranking is
    count-descending with lexicographic tie-break; tags with no correct
    predictions get an empty list.
    """
    counters: dict[str, Counter[str]] = {tag: Counter() for tag in bio.TAGS}
    for doc in docs:
        for i, sentence in enumerate(doc.sentences):
            if sentence.pred_tags is None:
                raise EvaluationError(
                    f"document {doc.doc_id!r} sentence {i} carries no predicted tags"
                )
            gold = bio.encode(sentence)
            for token, g, p in zip(sentence.tokens, gold, sentence.pred_tags):
                if g == p:
                    counters[g][token.text] += 1
    out: dict[str, list[tuple[str, int]]] = {}
    for tag in bio.TAGS:
        ranked = sorted(counters[tag].items(), key=lambda kv: (-kv[1], kv[0]))
        out[tag] = ranked[:k]
    return out


# --- sentence-level comparison baseline ------------------------------------


def baseline_sentence_classifier(
    train: list[tuple[list[str], ArgLabel]],
    test: list[tuple[list[str], ArgLabel]],
    seed: int = 0,
    epochs: int = 10,
) -> tuple[dict[ArgLabel, MetricsRow], list[ArgLabel]]:
    """Bag-of-words averaged perceptron over the four sentence types.

    Exists so the token-aggregation pipeline has an in-repo sentence-level
    comparator trained without token annotations. Deterministic for a
    fixed seed; returns the metrics table and the test predictions.
    """
    if not train:
        raise EvaluationError("baseline training set is empty")
    vocab: dict[str, int] = {}
    for tokens, _ in train:
        for tok in tokens:
            word = tok.lower()
            if word not in vocab:
                vocab[word] = len(vocab)
    n_classes = len(SENTENCE_LABELS)
    class_index = {label: i for i, label in enumerate(SENTENCE_LABELS)}
    V = len(vocab) + 1  # trailing bias column
    W = np.zeros((n_classes, V))
    U = np.zeros((n_classes, V))

    def vectorize(tokens: list[str]) -> tuple[np.ndarray, np.ndarray]:
        cols = Counter(vocab[t.lower()] for t in tokens if t.lower() in vocab)
        idx = np.fromiter(cols.keys(), dtype=np.int64, count=len(cols))
        val = np.fromiter(cols.values(), dtype=np.float64, count=len(cols))
        return np.append(idx, V - 1), np.append(val, 1.0)

    train_vecs = [(vectorize(tokens), class_index[label]) for tokens, label in train]
    rng = np.random.default_rng(seed)
    total = epochs * len(train_vecs)
    count = 0
    for _ in range(epochs):
        for i in rng.permutation(len(train_vecs)):
            (idx, val), gold = train_vecs[i]
            scores = W[:, idx] @ val
            pred = int(np.argmax(scores))  # ties -> lowest class index
            if pred != gold:
                W[gold, idx] += val
                W[pred, idx] -= val
                U[gold, idx] += count * val
                U[pred, idx] -= count * val
            count += 1
    W_avg = W - U / total

    predictions: list[ArgLabel] = []
    for tokens, _ in test:
        idx, val = vectorize(tokens)
        scores = W_avg[:, idx] @ val
        predictions.append(SENTENCE_LABELS[int(np.argmax(scores))])
    gold_labels = [label for _, label in test]
    return sentence_metrics(gold_labels, predictions), predictions

"""Corpus file formats: CoNLL-style tag columns and JSONL records.

CoNLL format
    ``# doc_id = <id>\\t<kind>`` starts a document; token lines are
    ``<token>\\t<tag>`` with tags drawn from the 7-tag inventory; a blank
    line ends a sentence. Character offsets are not stored: they are
    reconstructed canonically (tokens joined by single spaces), so CoNLL
    round-trips exactly for corpora with canonical offsets and without
    prediction slots. The records format round-trips everything.

Records format
    One document per line as JSON with fields ``doc_id``, ``kind`` and
    ``sentences``; each sentence has ``tokens`` (objects with ``text``,
    ``char_start``, ``char_end``) and ``spans`` (objects with ``label``,
    ``start_token``, ``end_token``), plus the optional fields
    ``sentence_label``, ``pred_tags``, ``pred_spans`` and ``pred_label``,
    present only when set.

``read_corpus`` with the default ``strict`` repair treats a CoNLL file as
gold data (ill-formed tags are rejected). Any other repair policy treats
the file as model output: the raw tags land in ``pred_tags`` and the
repaired spans in ``pred_spans``, leaving the gold slots empty.
"""

from __future__ import annotations

import json
from pathlib import Path

from . import bio
from .corpus import (
    ArgLabel,
    CorpusError,
    DOCUMENT_KINDS,
    Document,
    LabeledSpan,
    Sentence,
    Token,
    canonical_tokens,
)

FORMAT_CONLL = "conll"
FORMAT_RECORDS = "records"
CORPUS_FORMATS = (FORMAT_CONLL, FORMAT_RECORDS)

_DOC_HEADER = "# doc_id = "


def read_corpus(
    path: str | Path, format: str = FORMAT_CONLL, repair: str = bio.REPAIR_STRICT
) -> list[Document]:
    """Read a corpus file, validating all structural invariants.

    Errors carry file/line context and name the offending document and
    sentence where applicable.
    """
    path = Path(path)
    if format == FORMAT_CONLL:
        docs = _read_conll(path, repair)
    elif format == FORMAT_RECORDS:
        docs = _read_records(path)
    else:
        raise CorpusError(f"unknown corpus format {format!r}")
    seen: set[str] = set()
    for doc in docs:
        if doc.doc_id in seen:
            raise CorpusError(f"{path}: duplicate doc_id {doc.doc_id!r}")
        seen.add(doc.doc_id)
    return docs


def write_corpus(
    docs: list[Document],
    path: str | Path,
    format: str = FORMAT_CONLL,
    tags: str = "gold",
) -> None:
    """Write a corpus file; ``read_corpus`` of the result reproduces it.

    ``tags`` selects which annotation layer fills the CoNLL tag column
    ("gold" or "predicted"); the records format always stores every
    populated slot and ignores the flag.
    """
    path = Path(path)
    if format == FORMAT_CONLL:
        text = _render_conll(docs, tags)
    elif format == FORMAT_RECORDS:
        text = _render_records(docs)
    else:
        raise CorpusError(f"unknown corpus format {format!r}")
    path.write_text(text, encoding="utf-8")


# --- CoNLL ---------------------------------------------------------------


def _sentence_from_conll(
    texts: list[str], tags: list[str], repair: str, ctx: str
) -> Sentence:
    tokens = canonical_tokens(texts)
    try:
        if repair == bio.REPAIR_STRICT:
            spans = bio.decode(tags, bio.REPAIR_STRICT)
            return Sentence(tokens=tokens, spans=tuple(spans))
        spans = bio.decode(tags, repair)
        return Sentence(
            tokens=tokens,
            pred_tags=tuple(tags),
            pred_spans=tuple(spans),
        )
    except bio.TagError as exc:
        raise CorpusError(f"{ctx}: ill-formed tags at token {exc.index}: {exc}") from exc
    except CorpusError as exc:
        raise CorpusError(f"{ctx}: {exc}") from exc


def _read_conll(path: Path, repair: str) -> list[Document]:
    docs: list[Document] = []
    doc_id: str | None = None
    kind = ""
    sentences: list[Sentence] = []
    texts: list[str] = []
    tags: list[str] = []
    sent_line = 0

    def flush_sentence() -> None:
        nonlocal texts, tags
        if texts:
            ctx = f"{path}:{sent_line}: document {doc_id!r} sentence {len(sentences)}"
            sentences.append(_sentence_from_conll(texts, tags, repair, ctx))
            texts, tags = [], []

    def flush_document() -> None:
        nonlocal sentences, doc_id
        flush_sentence()
        if doc_id is not None:
            docs.append(Document(doc_id=doc_id, kind=kind, sentences=tuple(sentences)))
        sentences = []
        doc_id = None

    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise CorpusError(f"cannot read {path}: {exc}") from exc

    for lineno, line in enumerate(lines, start=1):
        if line.startswith(_DOC_HEADER):
            flush_document()
            rest = line[len(_DOC_HEADER) :]
            parts = rest.split("\t")
            if len(parts) != 2 or not parts[0]:
                raise CorpusError(f"{path}:{lineno}: malformed document header {line!r}")
            if parts[1] not in DOCUMENT_KINDS:
                raise CorpusError(f"{path}:{lineno}: unknown document kind {parts[1]!r}")
            doc_id, kind = parts
        elif not line.strip():
            flush_sentence()
        else:
            if doc_id is None:
                raise CorpusError(f"{path}:{lineno}: token line before any document header")
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise CorpusError(f"{path}:{lineno}: malformed token line {line!r}")
            if parts[1] not in bio.TAG_INDEX:
                raise CorpusError(f"{path}:{lineno}: unknown tag {parts[1]!r}")
            if not texts:
                sent_line = lineno
            texts.append(parts[0])
            tags.append(parts[1])
    flush_document()
    return docs


def _conll_tags(sentence: Sentence, tags: str) -> list[str]:
    if tags == "gold":
        return bio.encode(sentence)
    if tags == "predicted":
        if sentence.pred_tags is not None:
            return list(sentence.pred_tags)
        if sentence.pred_spans is not None:
            return bio.encode_spans(sentence.pred_spans, len(sentence.tokens))
        raise CorpusError("sentence carries no predictions to write")
    raise CorpusError(f"tags must be 'gold' or 'predicted', got {tags!r}")


def _render_conll(docs: list[Document], tags: str) -> str:
    out: list[str] = []
    for doc in docs:
        out.append(f"{_DOC_HEADER}{doc.doc_id}\t{doc.kind}")
        for sentence in doc.sentences:
            for token, tag in zip(sentence.tokens, _conll_tags(sentence, tags)):
                out.append(f"{token.text}\t{tag}")
            out.append("")
    return "\n".join(out) + ("\n" if out else "")


# --- records -------------------------------------------------------------


def _span_to_record(span: LabeledSpan) -> dict:
    return {
        "label": span.label.value,
        "start_token": span.start_token,
        "end_token": span.end_token,
    }


def _sentence_to_record(sentence: Sentence) -> dict:
    rec: dict = {
        "tokens": [
            {"text": t.text, "char_start": t.char_start, "char_end": t.char_end}
            for t in sentence.tokens
        ],
        "spans": [_span_to_record(s) for s in sentence.spans],
    }
    if sentence.sentence_label is not None:
        rec["sentence_label"] = sentence.sentence_label.value
    if sentence.pred_tags is not None:
        rec["pred_tags"] = list(sentence.pred_tags)
    if sentence.pred_spans is not None:
        rec["pred_spans"] = [_span_to_record(s) for s in sentence.pred_spans]
    if sentence.pred_label is not None:
        rec["pred_label"] = sentence.pred_label.value
    return rec


def document_to_record(doc: Document) -> dict:
    return {
        "doc_id": doc.doc_id,
        "kind": doc.kind,
        "sentences": [_sentence_to_record(s) for s in doc.sentences],
    }


def _render_records(docs: list[Document]) -> str:
    lines = [
        json.dumps(document_to_record(doc), ensure_ascii=False, separators=(",", ":"))
        for doc in docs
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def _require(rec: dict, key: str, ctx: str):
    if key not in rec:
        raise CorpusError(f"{ctx}: missing field {key!r}")
    return rec[key]


def _span_from_record(rec: dict, ctx: str) -> LabeledSpan:
    return LabeledSpan(
        label=ArgLabel.from_name(_require(rec, "label", ctx)),
        start_token=int(_require(rec, "start_token", ctx)),
        end_token=int(_require(rec, "end_token", ctx)),
    )


def _sentence_from_record(rec: dict, ctx: str) -> Sentence:
    try:
        return _build_sentence_from_record(rec, ctx)
    except CorpusError as exc:
        if str(exc).startswith(ctx):
            raise
        raise CorpusError(f"{ctx}: {exc}") from exc


def _build_sentence_from_record(rec: dict, ctx: str) -> Sentence:
    tokens = tuple(
        Token(
            text=str(_require(t, "text", ctx)),
            char_start=int(_require(t, "char_start", ctx)),
            char_end=int(_require(t, "char_end", ctx)),
        )
        for t in _require(rec, "tokens", ctx)
    )
    spans = tuple(_span_from_record(s, ctx) for s in _require(rec, "spans", ctx))
    pred_tags = rec.get("pred_tags")
    if pred_tags is not None:
        pred_tags = tuple(str(t) for t in pred_tags)
        for t in pred_tags:
            if t not in bio.TAG_INDEX:
                raise CorpusError(f"{ctx}: unknown tag {t!r} in pred_tags")
    pred_spans = rec.get("pred_spans")
    if pred_spans is not None:
        pred_spans = tuple(_span_from_record(s, ctx) for s in pred_spans)
    return Sentence(
        tokens=tokens,
        spans=spans,
        sentence_label=(
            ArgLabel.from_name(rec["sentence_label"]) if "sentence_label" in rec else None
        ),
        pred_tags=pred_tags,
        pred_spans=pred_spans,
        pred_label=(
            ArgLabel.from_name(rec["pred_label"]) if "pred_label" in rec else None
        ),
    )


def document_from_record(rec: dict, ctx: str = "record") -> Document:
    doc_id = str(_require(rec, "doc_id", ctx))
    sentences = []
    for i, sent in enumerate(_require(rec, "sentences", ctx)):
        sentences.append(_sentence_from_record(sent, f"{ctx}: document {doc_id!r} sentence {i}"))
    try:
        return Document(
            doc_id=doc_id,
            kind=str(_require(rec, "kind", ctx)),
            sentences=tuple(sentences),
        )
    except CorpusError as exc:
        if str(exc).startswith(ctx):
            raise
        raise CorpusError(f"{ctx}: {exc}") from exc


def _read_records(path: Path) -> list[Document]:
    docs: list[Document] = []
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise CorpusError(f"cannot read {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from exc
        try:
            docs.append(document_from_record(rec, ctx=f"{path}:{lineno}"))
        except CorpusError:
            raise
        except (TypeError, ValueError) as exc:
            raise CorpusError(f"{path}:{lineno}: malformed record: {exc}") from exc
    return docs

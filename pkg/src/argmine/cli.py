"""Command-line pipeline: convert, stats, split, synth, train, predict,
evaluate, align, indicators.

Every command is deterministic given its flags, inputs, and seed; seeds
are mandatory wherever randomness exists (train, split, synth). Exit
codes: 0 success, 1 usage error, 2 data error. Machine-readable outputs
(JSON) and human-readable tables are always separate files or streams.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields as dataclass_fields
from functools import partial
from pathlib import Path

from . import bio
from .aggregate import TIE_RULES, gold_sentence_label
from .align import MEASURES, project_labels, trace_to_records
from .corpus import (
    ArgLabel,
    CorpusError,
    SENTENCE_LABELS,
    SPAN_LABELS,
    corpus_stats_by_kind,
    document_from_text,
    select_documents,
    split_corpus,
)
from .corpus_io import CORPUS_FORMATS, read_corpus, write_corpus
from .evaluate import (
    EvaluationError,
    baseline_sentence_classifier,
    build_report,
    indicator_report,
    report_to_record,
    report_to_text,
)
from .synth import SynthConfig, generate
from .tagger import (
    ModelError,
    TrainConfig,
    load_model,
    make_training_chunks,
    predict_document,
    save_model,
    train_tagger,
)

_DATA_ERRORS = (CorpusError, EvaluationError, ModelError, OSError, ValueError)


class _Parser(argparse.ArgumentParser):
    # exit code 1 on usage errors (argparse defaults to 2, which we
    # reserve for data errors)
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt_arg(p, name="--format", default="conll", help_suffix="corpus"):
    p.add_argument(name, choices=CORPUS_FORMATS, default=default,
                   help=f"file format of the {help_suffix}")


def _write_json(path: Path, payload) -> None:
    path.write_text(
        json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="argmine",
        description="Token-level argument mining over legal text: "
        "BIO tagging of Issue/Reason/Conclusion spans.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser("convert", help="convert between corpus formats",
                       formatter_class=fmt)
    p.add_argument("--in", dest="infile", required=True, help="input file")
    p.add_argument("--in-format", choices=CORPUS_FORMATS + ("text",), default="conll",
                   help="input format ('text' ingests unannotated plain text)")
    p.add_argument("--out", required=True, help="output corpus file")
    p.add_argument("--out-format", choices=CORPUS_FORMATS, default="records",
                   help="output corpus format")
    p.add_argument("--kind", choices=("summary", "full_text"), default="summary",
                   help="document kind for plain-text ingestion")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("stats", help="span length statistics per label",
                       formatter_class=fmt)
    p.add_argument("--in", dest="infile", required=True)
    _fmt_arg(p)
    p.add_argument("--out", help="also write the table as JSON")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("split", help="write train/validation/test id lists",
                       formatter_class=fmt)
    p.add_argument("--in", dest="infile", required=True)
    _fmt_arg(p)
    p.add_argument("--ratios", default="0.8,0.1,0.1",
                   help="comma-separated train,validation,test ratios")
    p.add_argument("--seed", type=int, required=True, help="shuffle seed")
    p.add_argument("--out-prefix", required=True,
                   help="writes <prefix>.train.ids, .validation.ids, .test.ids")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("synth", help="generate a synthetic corpus",
                       formatter_class=fmt)
    p.add_argument("--config", help="JSON file of generator settings")
    p.add_argument("--seed", type=int, required=True, help="generator seed")
    p.add_argument("--n-docs", type=int, help="number of documents")
    p.add_argument("--noise", type=float, help="cue-token noise rate")
    p.add_argument("--mixed-rate", type=float,
                   help="probability of a two-span sentence")
    p.add_argument("--paired", action="store_true",
                   help="emit aligned summary/full-text pairs")
    p.add_argument("--out", required=True, help="output corpus file")
    _fmt_arg(p, "--out-format")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="train a tagger", formatter_class=fmt)
    p.add_argument("--train", dest="train_file", required=True, help="gold corpus")
    _fmt_arg(p)
    p.add_argument("--ids", help="restrict training to ids listed in this file")
    p.add_argument("--algo", choices=("perceptron", "crf"), default="perceptron",
                   help="training algorithm")
    p.add_argument("--epochs", type=int, default=10, help="training epochs")
    p.add_argument("--lr", type=float, default=0.1, help="learning rate")
    p.add_argument("--l2", type=float, default=0.0, help="CRF L2 strength")
    p.add_argument("--batch-size", type=int, default=8, help="CRF mini-batch size")
    p.add_argument("--class-weights", choices=("inverse", "uniform"), default="inverse",
                   help="inverse-frequency or uniform tag weighting")
    p.add_argument("--seed", type=int, required=True, help="shuffle seed")
    p.add_argument("--window", type=int, default=1024, help="chunk window in tokens")
    p.add_argument("--align-sentences", action="store_true",
                   help="end chunks at sentence boundaries")
    p.add_argument("--constrain", action="store_true",
                   help="mask ill-formed transitions when this model decodes")
    p.add_argument("--out", required=True, help="model file")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="tag a corpus with a trained model",
                       formatter_class=fmt)
    p.add_argument("--model", required=True, help="trained model file")
    p.add_argument("--in", dest="infile", required=True, help="corpus to tag")
    _fmt_arg(p)
    p.add_argument("--ids", help="restrict prediction to ids listed in this file")
    p.add_argument("--out", required=True, help="output corpus file")
    _fmt_arg(p, "--out-format")
    p.add_argument("--window", type=int, default=1024, help="chunk window in tokens")
    p.add_argument("--align-sentences", action="store_true")
    p.add_argument("--repair", choices=bio.REPAIR_POLICIES, default=bio.REPAIR_I_AS_B,
                   help="repair policy for ill-formed predicted tags")
    p.add_argument("--constrain", dest="constrain", action="store_true", default=None,
                   help="force constrained decoding")
    p.add_argument("--no-constrain", dest="constrain", action="store_false",
                   help="force unconstrained decoding")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers over documents")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="score predictions against gold",
                       formatter_class=fmt)
    p.add_argument("--gold", required=True, help="gold corpus")
    p.add_argument("--gold-format", choices=CORPUS_FORMATS, default="conll",
                   help="gold corpus format")
    p.add_argument("--pred", required=True, help="predicted corpus")
    p.add_argument("--pred-format", choices=CORPUS_FORMATS, default="conll",
                   help="predicted corpus format")
    p.add_argument("--repair", choices=bio.REPAIR_POLICIES, default=bio.REPAIR_I_AS_B,
                   help="repair policy when reading CoNLL predictions")
    p.add_argument("--tie-rule", choices=TIE_RULES, default="earliest",
                   help="sentence-label tie rule")
    p.add_argument("--out-prefix", required=True,
                   help="writes <prefix>.report.json and <prefix>.report.txt")
    p.add_argument("--compare-baseline", action="store_true",
                   help="also train the sentence-level baseline and compare")
    p.add_argument("--train", dest="train_file",
                   help="gold training corpus for the baseline")
    p.add_argument("--train-format", choices=CORPUS_FORMATS, default="conll",
                   help="baseline training corpus format")
    p.add_argument("--seed", type=int, help="baseline shuffle seed")
    p.add_argument("--baseline-epochs", type=int, default=10,
                   help="baseline training epochs")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers over documents")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("align", help="project summary labels onto a full text",
                       formatter_class=fmt)
    p.add_argument("--summary", required=True, help="labeled summary corpus (one doc)")
    p.add_argument("--full", required=True, help="full-text corpus (one doc)")
    _fmt_arg(p)
    p.add_argument("--measure", choices=MEASURES, default="jaccard",
                   help="sentence similarity measure")
    p.add_argument("--threshold", type=float, default=0.5,
                   help="minimum similarity for a proposal")
    p.add_argument("--top-k", type=int, default=3,
                   help="max proposals per summary sentence")
    p.add_argument("--out", required=True, help="projected corpus (records)")
    p.add_argument("--trace", required=True, help="alignment trace (JSONL)")
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("indicators", help="top correctly-tagged tokens per tag",
                       formatter_class=fmt)
    p.add_argument("--model", required=True, help="trained model file")
    p.add_argument("--in", dest="infile", required=True, help="gold corpus")
    _fmt_arg(p)
    p.add_argument("--k", type=int, default=10, help="tokens listed per tag")
    p.add_argument("--window", type=int, default=1024, help="chunk window in tokens")
    p.add_argument("--repair", choices=bio.REPAIR_POLICIES, default=bio.REPAIR_I_AS_B,
                   help="repair policy for predicted tags")
    p.add_argument("--out-prefix", required=True,
                   help="writes <prefix>.indicators.json and .txt")
    p.set_defaults(func=cmd_indicators)

    return parser


# --- commands --------------------------------------------------------------


def cmd_convert(args) -> int:
    if args.in_format == "text":
        text = Path(args.infile).read_text(encoding="utf-8")
        docs = [document_from_text(Path(args.infile).stem, args.kind, text)]
    else:
        docs = read_corpus(args.infile, args.in_format)
    write_corpus(docs, args.out, args.out_format)
    return 0


def cmd_stats(args) -> int:
    docs = read_corpus(args.infile, args.format)
    by_kind = corpus_stats_by_kind(docs)
    payload = {}
    for kind, table in by_kind.items():
        payload[kind] = {
            label.value: {
                "count": row.count,
                "min": row.min_len,
                "max": row.max_len,
                "mean": row.mean_len,
            }
            for label, row in table.items()
        }
        print(f"{kind} ({sum(1 for d in docs if d.kind == kind)} documents)")
        print(f"  {'label':<12} {'count':>6} {'min':>5} {'max':>5} {'mean':>8}")
        for label in SPAN_LABELS:
            row = table[label]
            if row.count == 0:
                print(f"  {label.value:<12} {0:>6} {'-':>5} {'-':>5} {'-':>8}")
            else:
                print(
                    f"  {label.value:<12} {row.count:>6} {row.min_len:>5} "
                    f"{row.max_len:>5} {row.mean_len:>8.2f}"
                )
    if args.out:
        _write_json(Path(args.out), payload)
    return 0


def _parse_ratios(raw: str) -> tuple[float, float, float]:
    parts = raw.split(",")
    if len(parts) != 3:
        raise CorpusError(f"--ratios needs three comma-separated numbers, got {raw!r}")
    try:
        return tuple(float(p) for p in parts)  # type: ignore[return-value]
    except ValueError as exc:
        raise CorpusError(f"bad --ratios value {raw!r}: {exc}") from exc


def cmd_split(args) -> int:
    docs = read_corpus(args.infile, args.format)
    split = split_corpus(docs, _parse_ratios(args.ratios), args.seed)
    for name, ids in (
        ("train", split.train),
        ("validation", split.validation),
        ("test", split.test),
    ):
        path = Path(f"{args.out_prefix}.{name}.ids")
        path.write_text("".join(f"{i}\n" for i in sorted(ids)), encoding="utf-8")
        print(f"{name}: {len(ids)} documents -> {path}")
    return 0


def _synth_config(args) -> SynthConfig:
    params: dict = {}
    if args.config:
        raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        known = {f.name for f in dataclass_fields(SynthConfig)}
        unknown = set(raw) - known
        if unknown:
            raise CorpusError(f"unknown generator settings: {sorted(unknown)}")
        params.update(raw)
        if "label_proportions" in params:
            params["label_proportions"] = tuple(params["label_proportions"])
        for key in ("filler_token_range", "sentences_per_doc"):
            if key in params:
                params[key] = tuple(params[key])
        if "span_token_range" in params:
            params["span_token_range"] = {
                k: tuple(v) for k, v in params["span_token_range"].items()
            }
        if "lexicons" in params:
            params["lexicons"] = {k: tuple(v) for k, v in params["lexicons"].items()}
    params["seed"] = args.seed
    if args.n_docs is not None:
        params["n_docs"] = args.n_docs
    if args.noise is not None:
        params["noise_rate"] = args.noise
    if args.mixed_rate is not None:
        params["mixed_rate"] = args.mixed_rate
    if args.paired:
        params["paired"] = True
    return SynthConfig(**params)


def cmd_synth(args) -> int:
    docs = generate(_synth_config(args))
    write_corpus(docs, args.out, args.out_format)
    print(f"wrote {len(docs)} documents to {args.out}")
    return 0


def _read_ids(path: str) -> frozenset[str]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return frozenset(line.strip() for line in lines if line.strip())


def cmd_train(args) -> int:
    docs = read_corpus(args.train_file, args.format)
    if args.ids:
        docs = select_documents(docs, _read_ids(args.ids))
    chunks = make_training_chunks(docs, args.window, args.align_sentences)
    config = TrainConfig(
        algorithm=args.algo,
        epochs=args.epochs,
        learning_rate=args.lr,
        l2=args.l2,
        class_weights=args.class_weights,
        seed=args.seed,
        constrain_transitions=args.constrain,
        batch_size=args.batch_size,
    )
    model = train_tagger(chunks, config)
    save_model(model, args.out)
    print(
        f"trained {args.algo} on {len(chunks)} chunks "
        f"({len(model.feature_names)} features) -> {args.out}"
    )
    return 0


def _predict_one(model, window, align, repair, constrain, doc):
    return predict_document(model, doc, window, align, repair, constrain)


def cmd_predict(args) -> int:
    model = load_model(args.model)
    docs = read_corpus(args.infile, args.format)
    if args.ids:
        docs = select_documents(docs, _read_ids(args.ids))
    worker = partial(
        _predict_one, model, args.window, args.align_sentences, args.repair,
        args.constrain,
    )
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            predicted = list(pool.map(worker, docs))
    else:
        predicted = [worker(doc) for doc in docs]
    write_corpus(predicted, args.out, args.out_format, tags="predicted")
    print(f"tagged {len(predicted)} documents -> {args.out}")
    return 0


def _doc_sentence_pairs(doc) -> list[tuple[list[str], ArgLabel]]:
    return [
        ([t.text for t in s.tokens], gold_sentence_label(s)) for s in doc.sentences
    ]


def cmd_evaluate(args) -> int:
    gold_docs = read_corpus(args.gold, args.gold_format)
    pred_docs = read_corpus(args.pred, args.pred_format, repair=args.repair)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            sentence_pairs = [
                pair for doc_pairs in pool.map(_doc_sentence_pairs, gold_docs)
                for pair in doc_pairs
            ]
    else:
        sentence_pairs = [p for doc in gold_docs for p in _doc_sentence_pairs(doc)]
    report = build_report(gold_docs, pred_docs, tie_rule=args.tie_rule)
    record = report_to_record(report)

    if args.compare_baseline:
        if not args.train_file:
            raise EvaluationError("--compare-baseline requires --train")
        if args.seed is None:
            raise EvaluationError("--compare-baseline requires --seed")
        train_docs = read_corpus(args.train_file, args.train_format)
        train_pairs = [p for doc in train_docs for p in _doc_sentence_pairs(doc)]
        baseline_table, _ = baseline_sentence_classifier(
            train_pairs, sentence_pairs, seed=args.seed, epochs=args.baseline_epochs
        )
        comparison = {}
        wins = 0
        for label in SENTENCE_LABELS:
            pipe = report.sentence_table[label].f1
            base = baseline_table[label].f1
            comparison[label.value] = {
                "token_pipeline_f1": pipe,
                "baseline_f1": base,
                "pipeline_wins_or_ties": (
                    None if pipe is None or base is None else pipe >= base
                ),
            }
            if label != ArgLabel.NON_IRC and pipe is not None and base is not None:
                wins += pipe >= base
        record["baseline_comparison"] = {
            "per_type": comparison,
            "irc_classes_where_pipeline_wins_or_ties": wins,
        }

    _write_json(Path(f"{args.out_prefix}.report.json"), record)
    text = report_to_text(report)
    if args.compare_baseline:
        lines = ["", "baseline comparison (sentence F1)"]
        for label in SENTENCE_LABELS:
            row = record["baseline_comparison"]["per_type"][label.value]
            pipe = "absent" if row["token_pipeline_f1"] is None else f"{row['token_pipeline_f1']:.4f}"
            base = "absent" if row["baseline_f1"] is None else f"{row['baseline_f1']:.4f}"
            lines.append(f"  {label.value:<12} pipeline {pipe}  baseline {base}")
        text += "\n".join(lines) + "\n"
    Path(f"{args.out_prefix}.report.txt").write_text(text, encoding="utf-8")
    print(text)
    return 0


def cmd_align(args) -> int:
    summaries = read_corpus(args.summary, args.format)
    fulls = read_corpus(args.full, args.format)
    if len(summaries) != 1 or len(fulls) != 1:
        raise CorpusError(
            "align expects exactly one summary document and one full-text document"
        )
    projected, trace = project_labels(
        summaries[0], fulls[0], args.threshold, args.top_k, args.measure
    )
    write_corpus([projected], args.out, "records")
    Path(args.trace).write_text(
        "".join(json.dumps(rec) + "\n" for rec in trace_to_records(trace)),
        encoding="utf-8",
    )
    accepted = sum(1 for e in trace if e.accepted)
    print(f"{accepted} sentences labeled, {len(trace)} candidate pairs traced")
    return 0


def cmd_indicators(args) -> int:
    model = load_model(args.model)
    docs = read_corpus(args.infile, args.format)
    predicted = [
        predict_document(model, doc, args.window, repair=args.repair) for doc in docs
    ]
    table = indicator_report(predicted, k=args.k)
    _write_json(
        Path(f"{args.out_prefix}.indicators.json"),
        {tag: [[text, count] for text, count in rows] for tag, rows in table.items()},
    )
    lines = []
    for tag in bio.TAGS:
        rows = table[tag]
        listing = ", ".join(f"{text} ({count})" for text, count in rows) or "(none)"
        lines.append(f"{tag:<14} {listing}")
    text = "\n".join(lines) + "\n"
    Path(f"{args.out_prefix}.indicators.txt").write_text(text, encoding="utf-8")
    print(text)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _DATA_ERRORS as exc:
        print(f"argmine: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

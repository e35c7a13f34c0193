"""Token-level legal argument mining toolkit.

BIO tagging of Issue/Reason/Conclusion spans with desk-scale
linear-chain taggers (averaged structured perceptron, first-order CRF),
token-to-sentence label aggregation, the full evaluation protocol, and a
deterministic synthetic-corpus generator.
"""

from .corpus import (
    ArgLabel,
    CorpusError,
    CorpusSplit,
    Document,
    LabeledSpan,
    LengthStats,
    Sentence,
    Token,
    corpus_stats,
    corpus_stats_by_kind,
    document_from_text,
    select_documents,
    split_corpus,
)
from .corpus_io import read_corpus, write_corpus
from .bio import TAGS, decode, encode, is_well_formed
from .chunking import Chunk, chunk_document, unchunk_tags
from .features import FeatureConfig, extract
from .tagger import (
    TaggerModel,
    TrainConfig,
    load_model,
    predict_document,
    save_model,
    train_tagger,
)
from .aggregate import label_document, sentence_label
from .evaluate import (
    EvalReport,
    baseline_sentence_classifier,
    build_report,
    cohens_kappa,
    confusion,
    indicator_report,
    sentence_metrics,
    token_metrics,
)
from .align import project_labels, similarity
from .synth import SynthConfig, generate

__version__ = "0.1.0"

__all__ = [
    "ArgLabel",
    "Chunk",
    "CorpusError",
    "CorpusSplit",
    "Document",
    "EvalReport",
    "FeatureConfig",
    "LabeledSpan",
    "LengthStats",
    "Sentence",
    "SynthConfig",
    "TAGS",
    "TaggerModel",
    "Token",
    "TrainConfig",
    "baseline_sentence_classifier",
    "build_report",
    "chunk_document",
    "cohens_kappa",
    "confusion",
    "corpus_stats",
    "corpus_stats_by_kind",
    "decode",
    "document_from_text",
    "encode",
    "extract",
    "generate",
    "indicator_report",
    "is_well_formed",
    "label_document",
    "load_model",
    "predict_document",
    "project_labels",
    "read_corpus",
    "save_model",
    "select_documents",
    "sentence_label",
    "sentence_metrics",
    "similarity",
    "split_corpus",
    "token_metrics",
    "train_tagger",
    "unchunk_tags",
    "write_corpus",
]

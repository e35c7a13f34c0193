import json

import numpy as np
import pytest

from argmine import bio
from argmine.corpus import ArgLabel, Document, SENTENCE_LABELS, Sentence, canonical_tokens
from argmine.evaluate import (
    EvaluationError,
    baseline_sentence_classifier,
    build_report,
    classification_table,
    cohens_kappa,
    confusion,
    indicator_report,
    macro_f1,
    report_to_record,
    report_to_text,
    sentence_metrics,
    token_metrics,
)

from oracles import naive_confusion, naive_kappa, naive_prf, random_tag_sequence


class TestTokenMetrics:
    def test_perfect_predictions(self):
        gold = ["B-Issue", "I-Issue", "O", "B-Reason"]
        table = token_metrics(gold, gold)
        for tag in ("B-Issue", "I-Issue", "O", "B-Reason"):
            row = table[tag]
            assert (row.precision, row.recall, row.f1) == (1.0, 1.0, 1.0)

    def test_hand_counted_case(self):
        gold = ["B-Issue", "I-Issue", "O", "O"]
        pred = ["B-Issue", "O", "O", "O"]
        table = token_metrics(gold, pred)
        assert table["B-Issue"].precision == 1.0
        assert table["B-Issue"].recall == 1.0
        # I-Issue predicted never: precision undefined -> 0 convention
        assert table["I-Issue"].precision == 0.0
        assert table["I-Issue"].recall == 0.0
        assert table["I-Issue"].support == 1
        assert table["O"].precision == pytest.approx(2 / 3)
        assert table["O"].recall == 1.0

    def test_absent_class_marked_absent(self):
        table = token_metrics(["O", "O"], ["O", "O"])
        row = table["B-Conclusion"]
        assert row.support == 0 and row.predicted == 0
        assert row.precision is None and row.recall is None and row.f1 is None

    def test_length_mismatch(self):
        with pytest.raises(EvaluationError):
            token_metrics(["O"], ["O", "O"])

    def test_matches_naive_recount_on_random_pairs(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 40))
            gold = random_tag_sequence(rng, n, bio.TAGS)
            pred = random_tag_sequence(rng, n, bio.TAGS)
            table = token_metrics(gold, pred)
            ref = naive_prf(gold, pred, bio.TAGS)
            for tag in bio.TAGS:
                row = table[tag]
                p, r, f, support, predicted = ref[tag]
                assert (row.support, row.predicted) == (support, predicted)
                if p is None:
                    assert row.precision is None
                else:
                    assert row.precision == pytest.approx(p, abs=1e-12)
                    assert row.recall == pytest.approx(r, abs=1e-12)
                    assert row.f1 == pytest.approx(f, abs=1e-12)


class TestSentenceMetrics:
    def test_perfect(self):
        labels = [ArgLabel.ISSUE, ArgLabel.NON_IRC, ArgLabel.REASON]
        table = sentence_metrics(labels, labels)
        for label in labels:
            assert table[label].f1 == 1.0

    def test_all_non_irc_predictions_zero_irc_recall(self):
        gold = [ArgLabel.ISSUE, ArgLabel.REASON, ArgLabel.NON_IRC, ArgLabel.CONCLUSION]
        pred = [ArgLabel.NON_IRC] * 4
        table = sentence_metrics(gold, pred)
        for label in (ArgLabel.ISSUE, ArgLabel.REASON, ArgLabel.CONCLUSION):
            assert table[label].recall == 0.0

    def test_hand_built_six_sentence_case(self, rng):
        gold = [
            ArgLabel.ISSUE, ArgLabel.ISSUE, ArgLabel.REASON,
            ArgLabel.CONCLUSION, ArgLabel.NON_IRC, ArgLabel.NON_IRC,
        ]
        pred = [
            ArgLabel.ISSUE, ArgLabel.REASON, ArgLabel.REASON,
            ArgLabel.NON_IRC, ArgLabel.NON_IRC, ArgLabel.CONCLUSION,
        ]
        table = sentence_metrics(gold, pred)
        ref = naive_prf(gold, pred, SENTENCE_LABELS)
        for label in SENTENCE_LABELS:
            p, r, f, support, predicted = ref[label]
            assert table[label].precision == pytest.approx(p, abs=1e-12)
            assert table[label].recall == pytest.approx(r, abs=1e-12)
            assert table[label].f1 == pytest.approx(f, abs=1e-12)


class TestConfusion:
    def test_arithmetic(self):
        gold = ["a"] * 10 + ["b"] * 10
        pred = ["a"] * 8 + ["b"] * 2 + ["a"] * 1 + ["b"] * 9
        counts, percent = confusion(gold, pred, ["a", "b"])
        assert counts.tolist() == [[8, 2], [1, 9]]
        assert percent == [[80.0, 20.0], [10.0, 90.0]]

    def test_diagonal_only(self):
        counts, percent = confusion(["a", "b"], ["a", "b"], ["a", "b"])
        assert percent == [[100.0, 0.0], [0.0, 100.0]]

    def test_empty_gold_row_absent(self):
        counts, percent = confusion(["a", "a"], ["a", "b"], ["a", "b"])
        assert percent[1] is None

    def test_rows_sum_to_100(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 50))
            gold = random_tag_sequence(rng, n, bio.TAGS)
            pred = random_tag_sequence(rng, n, bio.TAGS)
            counts, percent = confusion(gold, pred, bio.TAGS)
            assert counts.tolist() == naive_confusion(gold, pred, bio.TAGS)
            for row in percent:
                if row is not None:
                    assert sum(row) == pytest.approx(100.0, abs=1e-9)

    def test_unknown_class_rejected(self):
        with pytest.raises(EvaluationError):
            confusion(["z"], ["a"], ["a", "b"])

    def test_micro_accuracy_is_trace_over_total(self, rng):
        gold = random_tag_sequence(rng, 200, bio.TAGS)
        pred = random_tag_sequence(rng, 200, bio.TAGS)
        counts, _ = confusion(gold, pred, bio.TAGS)
        acc = sum(1 for g, p in zip(gold, pred) if g == p) / len(gold)
        assert np.trace(counts) / counts.sum() == pytest.approx(acc, abs=1e-12)


class TestKappa:
    def test_identical_sequences(self, rng):
        for _ in range(20):
            x = random_tag_sequence(rng, int(rng.integers(1, 30)), ("a", "b", "c"))
            assert cohens_kappa(x, x) == 1.0

    def test_worked_example_is_exactly_zero(self):
        assert cohens_kappa([1, 0, 1, 0], [1, 1, 0, 0]) == 0.0

    def test_symmetry(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 30))
            a = random_tag_sequence(rng, n, ("x", "y", "z"))
            b = random_tag_sequence(rng, n, ("x", "y", "z"))
            assert cohens_kappa(a, b) == pytest.approx(cohens_kappa(b, a), abs=1e-12)

    def test_matches_naive(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 30))
            a = random_tag_sequence(rng, n, ("x", "y"))
            b = random_tag_sequence(rng, n, ("x", "y"))
            assert cohens_kappa(a, b) == pytest.approx(naive_kappa(a, b), abs=1e-12)

    def test_relabeling_bijection_invariance(self, rng):
        mapping = {"x": "u", "y": "v", "z": "w"}
        for _ in range(50):
            n = int(rng.integers(1, 30))
            a = random_tag_sequence(rng, n, ("x", "y", "z"))
            b = random_tag_sequence(rng, n, ("x", "y", "z"))
            a2 = [mapping[c] for c in a]
            b2 = [mapping[c] for c in b]
            assert cohens_kappa(a, b) == pytest.approx(cohens_kappa(a2, b2), abs=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(EvaluationError):
            cohens_kappa([], [])

    def test_degenerate_single_class(self):
        assert cohens_kappa(["a", "a"], ["a", "a"]) == 1.0


class TestBijectionInvarianceOfF1:
    def test_f1_table_invariant_up_to_renaming(self, rng):
        classes = ("x", "y", "z")
        mapping = {"x": "y", "y": "z", "z": "x"}
        for _ in range(30):
            n = int(rng.integers(1, 40))
            gold = random_tag_sequence(rng, n, classes)
            pred = random_tag_sequence(rng, n, classes)
            t1 = classification_table(gold, pred, classes)
            t2 = classification_table(
                [mapping[g] for g in gold], [mapping[p] for p in pred], classes
            )
            for cls in classes:
                assert t1[cls] == t2[mapping[cls]]


def predicted_doc(token_rows, doc_id="d"):
    """token_rows: list of sentences as (words, gold_tags, pred_tags)."""
    sentences = []
    for words, gold_tags, pred_tags in token_rows:
        spans = tuple(bio.decode(gold_tags, bio.REPAIR_STRICT))
        sentences.append(
            Sentence(
                tokens=canonical_tokens(words),
                spans=spans,
                pred_tags=tuple(pred_tags),
                pred_spans=tuple(bio.decode(pred_tags, bio.REPAIR_I_AS_B)),
            )
        )
    return Document(doc_id, "summary", tuple(sentences))


class TestIndicatorReport:
    def test_correct_conclusion_cue_ranks_first(self):
        rows = [
            (["HELD", "done"], ["B-Conclusion", "I-Conclusion"], ["B-Conclusion", "I-Conclusion"]),
            (["HELD", "over"], ["B-Conclusion", "I-Conclusion"], ["B-Conclusion", "O"]),
            (["Thus", "fine"], ["B-Conclusion", "I-Conclusion"], ["B-Conclusion", "I-Conclusion"]),
        ]
        table = indicator_report([predicted_doc(rows)])
        assert table["B-Conclusion"][0] == ("HELD", 2)

    def test_tag_with_no_correct_predictions_is_empty(self):
        rows = [(["what"], ["B-Issue"], ["O"])]
        table = indicator_report([predicted_doc(rows)])
        assert table["B-Issue"] == []

    def test_ranking_count_desc_then_lexicographic(self):
        rows = [
            (["b", "a"], ["O", "O"], ["O", "O"]),
            (["a", "c"], ["O", "O"], ["O", "O"]),
        ]
        table = indicator_report([predicted_doc(rows)])
        assert table["O"] == [("a", 2), ("b", 1), ("c", 1)]

    def test_k_limits_rows(self):
        rows = [([f"w{i}" for i in range(9)], ["O"] * 9, ["O"] * 9)]
        table = indicator_report([predicted_doc(rows)], k=3)
        assert len(table["O"]) == 3

    def test_missing_predictions_rejected(self):
        doc = Document(
            "d", "summary", (Sentence(tokens=canonical_tokens(["x"])),)
        )
        with pytest.raises(EvaluationError):
            indicator_report([doc])


class TestBaseline:
    def rows(self, rng, n, separable=True):
        lexicon = {
            ArgLabel.ISSUE: ["whether", "question", "scope"],
            ArgLabel.REASON: ["because", "evidence", "facts"],
            ArgLabel.CONCLUSION: ["held", "allowed", "dismissed"],
            ArgLabel.NON_IRC: ["the", "of", "other"],
        }
        out = []
        for _ in range(n):
            label = SENTENCE_LABELS[int(rng.integers(0, 4))]
            words = [
                lexicon[label][int(rng.integers(0, 3))]
                for _ in range(int(rng.integers(2, 6)))
            ]
            if not separable:
                words += ["shared"]
            out.append((words, label))
        return out

    def test_separable_data_reaches_high_f1(self, rng):
        train = self.rows(rng, 200)
        test = self.rows(rng, 80)
        table, _ = baseline_sentence_classifier(train, test, seed=3)
        for label in SENTENCE_LABELS:
            if table[label].support:
                assert table[label].f1 >= 0.95

    def test_single_class_training_predicts_that_class(self, rng):
        train = [(["any", "words"], ArgLabel.REASON)] * 5
        test = self.rows(rng, 20)
        _, preds = baseline_sentence_classifier(train, test, seed=0)
        assert set(preds) == {ArgLabel.REASON}

    def test_deterministic(self, rng):
        train = self.rows(rng, 60)
        test = self.rows(rng, 30)
        t1, p1 = baseline_sentence_classifier(train, test, seed=9)
        t2, p2 = baseline_sentence_classifier(train, test, seed=9)
        assert p1 == p2 and t1 == t2

    def test_empty_training_rejected(self):
        with pytest.raises(EvaluationError):
            baseline_sentence_classifier([], [])


class TestReport:
    def make_pair(self):
        gold_rows = [
            (["whether", "costs"], ["B-Issue", "I-Issue"], ["B-Issue", "I-Issue"]),
            (["HELD", "done", "now"], ["B-Conclusion", "I-Conclusion", "O"],
             ["B-Conclusion", "O", "O"]),
        ]
        doc = predicted_doc(gold_rows)
        return [doc], [doc]

    def test_report_shapes_and_serialization(self):
        gold_docs, pred_docs = self.make_pair()
        report = build_report(gold_docs, pred_docs)
        record = report_to_record(report)
        # stable, machine-readable, and round-trips through json
        blob = json.dumps(record)
        assert json.loads(blob) == record
        assert record["token"]["classes"] == list(bio.TAGS)
        assert record["note"].startswith("counts are corpus-level micro")
        text = report_to_text(report)
        assert "token-level (7 tags)" in text
        assert "sentence-level (4 types)" in text

    def test_mismatched_corpora_rejected(self):
        gold_docs, _ = self.make_pair()
        other = predicted_doc(
            [(["one"], ["O"], ["O"])], doc_id="other"
        )
        with pytest.raises(EvaluationError):
            build_report(gold_docs, [other])

    def test_token_accuracy_matches_trace(self):
        gold_docs, pred_docs = self.make_pair()
        report = build_report(gold_docs, pred_docs)
        assert report.token_accuracy == pytest.approx(
            np.trace(report.token_confusion) / report.n_tokens
        )

    def test_span_exact_counts(self):
        gold_docs, pred_docs = self.make_pair()
        report = build_report(gold_docs, pred_docs)
        # sentence 1: gold Conclusion(0-1) vs predicted Conclusion(0-0)
        assert report.span_exact.support == 2
        assert report.span_exact.predicted == 2
        assert report.span_exact.precision == 0.5


def test_macro_f1_over_selected_classes():
    table = classification_table(["a", "b", "a"], ["a", "b", "b"], ["a", "b", "c"])
    # c absent from both: excluded from default macro
    got = macro_f1(table)
    expected = (table["a"].f1 + table["b"].f1) / 2
    assert got == pytest.approx(expected)
    assert macro_f1(table, ["a"]) == table["a"].f1

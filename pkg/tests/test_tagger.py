import math

import numpy as np
import pytest

from argmine import bio, kernels
from argmine.chunking import Chunk
from argmine.corpus import Document, canonical_tokens
from argmine.features import FeatureConfig
from argmine.synth import generate, separable_config
from argmine.tagger import (
    ModelError,
    TaggerModel,
    TrainConfig,
    load_model,
    log_partition,
    make_training_chunks,
    predict_document,
    resolve_class_weights,
    save_model,
    score_path,
    train_crf,
    train_perceptron,
    train_tagger,
    transition_masks,
    viterbi,
)

from oracles import brute_logz, brute_viterbi, brute_weighted_loss, dyadic, fd_gradient

N_TAGS = len(bio.TAGS)

MINIMAL = FeatureConfig(
    word_case=False,
    affixes=False,
    shape=False,
    all_caps=False,
    sentence_initial=False,
    context_window=0,
    position_bucket=False,
)


def words_chunk(words, tags=None):
    tokens = canonical_tokens(words)
    chunk = Chunk(
        doc_id="d",
        chunk_index=0,
        tokens=tokens,
        positions=tuple((0, t) for t in range(len(tokens))),
        doc_token_start=0,
        doc_token_count=len(tokens),
    )
    return chunk.with_tags(tags) if tags else chunk


def model_from_arrays(words, emission_by_word, transition, start, stop):
    """Model whose word-identity features produce the given per-word
    emissions (MINIMAL config: exactly one active feature per token)."""
    names = tuple(f"w={w}" for w in dict.fromkeys(words))
    index = {n: i for i, n in enumerate(names)}
    emission = np.zeros((len(names), N_TAGS))
    for word, row in emission_by_word.items():
        emission[index[f"w={word}"]] = row
    return TaggerModel(
        tags=bio.TAGS,
        feature_names=names,
        feature_index=index,
        emission=emission,
        transition=np.asarray(transition, dtype=float),
        start=np.asarray(start, dtype=float),
        stop=np.asarray(stop, dtype=float),
        feature_config=MINIMAL,
        train_config=TrainConfig(),
    )


def random_model(rng, words, scale=1.0, dyadic_weights=False):
    draw = (lambda shape: dyadic(rng, shape)) if dyadic_weights else (
        lambda shape: scale * rng.normal(size=shape)
    )
    uniq = tuple(dict.fromkeys(words))
    emission_by_word = {w: draw(N_TAGS) for w in uniq}
    return model_from_arrays(
        words, emission_by_word, draw((N_TAGS, N_TAGS)), draw(N_TAGS), draw(N_TAGS)
    )


def model_arrays_for_chunk(model, chunk):
    from argmine.features import chunk_csr

    indptr, indices = chunk_csr(chunk, model.feature_config, model.feature_index)
    emis = kernels.emissions(indptr, indices, model.emission)
    return emis, model.transition, model.start, model.stop


class TestScorePath:
    def test_zero_weight_model_scores_zero(self):
        words = ["any", "path", "at", "all"]
        model = model_from_arrays(
            words, {}, np.zeros((N_TAGS, N_TAGS)), np.zeros(N_TAGS), np.zeros(N_TAGS)
        )
        chunk = words_chunk(words)
        for tags in (["O"] * 4, ["B-Issue", "I-Issue", "O", "B-Reason"]):
            assert score_path(model, chunk, tags) == 0.0

    def test_two_token_two_tag_toy(self):
        # tags A=O, B=B-Issue; emissions t1:(A=2,B=0), t2:(A=0,B=1);
        # transitions all zero except A->B = -2; start/stop zero
        trans = np.zeros((N_TAGS, N_TAGS))
        trans[0, 1] = -2.0
        model = model_from_arrays(
            ["u", "v"],
            {"u": np.array([2.0, 0, 0, 0, 0, 0, 0]), "v": np.array([0.0, 1, 0, 0, 0, 0, 0])},
            trans,
            np.zeros(N_TAGS),
            np.zeros(N_TAGS),
        )
        chunk = words_chunk(["u", "v"])
        assert score_path(model, chunk, ["O", "O"]) == 2.0
        assert score_path(model, chunk, ["O", "B-Issue"]) == 1.0
        assert score_path(model, chunk, ["B-Issue", "O"]) == 0.0
        assert score_path(model, chunk, ["B-Issue", "B-Issue"]) == 1.0
        # viterbi picks the best of the four
        assert viterbi(model, chunk) == ["O", "O"]

    def test_length_mismatch_rejected(self):
        model = random_model(np.random.default_rng(0), ["a"])
        with pytest.raises(ModelError):
            score_path(model, words_chunk(["a"]), ["O", "O"])

    def test_score_local_to_context_window(self, rng):
        # editing a token changes only the contributions of positions
        # within the feature context window around the edit
        words_a = ["u0", "u1", "u2", "u3", "u4", "u5"]
        words_b = ["u0", "u1", "u2", "u3", "u4", "u6"]
        model = random_model(rng, words_a + ["u6"])
        chunk_a, chunk_b = words_chunk(words_a), words_chunk(words_b)
        emis_a = model_arrays_for_chunk(model, chunk_a)[0]
        emis_b = model_arrays_for_chunk(model, chunk_b)[0]
        window = model.feature_config.context_window
        np.testing.assert_array_equal(emis_a[: 5 - window], emis_b[: 5 - window])
        for _ in range(10):
            tags = [bio.TAGS[int(rng.integers(0, N_TAGS))] for _ in range(6)]
            delta = score_path(model, chunk_a, tags) - score_path(model, chunk_b, tags)
            affected = sum(
                emis_a[t, bio.TAG_INDEX[tags[t]]] - emis_b[t, bio.TAG_INDEX[tags[t]]]
                for t in range(5 - window, 6)
            )
            assert delta == pytest.approx(affected, abs=1e-12)


class TestViterbi:
    def test_emission_dominant_is_per_token_argmax(self, rng):
        words = [f"w{i}" for i in range(6)]
        emission_by_word = {w: rng.normal(size=N_TAGS) for w in words}
        model = model_from_arrays(
            words, emission_by_word, np.zeros((N_TAGS, N_TAGS)),
            np.zeros(N_TAGS), np.zeros(N_TAGS),
        )
        chunk = words_chunk(words)
        expected = [bio.TAGS[int(np.argmax(emission_by_word[w]))] for w in words]
        assert viterbi(model, chunk) == expected

    def test_matches_brute_force_on_random_models(self, rng):
        for _ in range(200):
            n = int(rng.integers(1, 5))
            words = [f"w{rng.integers(0, 4)}" for _ in range(n)]
            model = random_model(rng, words, dyadic_weights=True)
            chunk = words_chunk(words)
            emis, T, s, e = model_arrays_for_chunk(model, chunk)
            best_path, best_score = brute_viterbi(emis, T, s, e)
            got = viterbi(model, chunk)
            assert [bio.TAG_INDEX[t] for t in got] == list(best_path)
            assert score_path(model, chunk, got) == pytest.approx(best_score, abs=1e-12)

    def test_constrained_decode_is_well_formed(self, rng):
        # adversarial weights that make the unconstrained argmax ill-formed
        words = ["x", "y"]
        emission = {
            "x": np.array([1.0, 0, 0, 0, 0, 0, 0]),
            "y": np.array([0.0, 0, 0, 0, 5.0, 0, 0]),  # I-Reason dominates
        }
        model = model_from_arrays(
            words, emission, np.zeros((N_TAGS, N_TAGS)), np.zeros(N_TAGS), np.zeros(N_TAGS)
        )
        chunk = words_chunk(words)
        assert viterbi(model, chunk, constrain=False) == ["O", "I-Reason"]
        constrained = viterbi(model, chunk, constrain=True)
        ok, _ = bio.is_well_formed(constrained)
        assert ok
        # and on random adversarial models the output is always well-formed
        for _ in range(100):
            words = [f"w{rng.integers(0, 5)}" for _ in range(int(rng.integers(1, 6)))]
            model = random_model(rng, words, scale=3.0)
            got = viterbi(model, words_chunk(words), constrain=True)
            ok, _ = bio.is_well_formed(got)
            assert ok

    def test_constrained_matches_masked_brute_force(self, rng):
        allowed_start, allowed_trans = transition_masks(True)
        for _ in range(50):
            n = int(rng.integers(1, 5))
            words = [f"w{rng.integers(0, 4)}" for _ in range(n)]
            model = random_model(rng, words, dyadic_weights=True)
            chunk = words_chunk(words)
            emis, T, s, e = model_arrays_for_chunk(model, chunk)
            best_path, _ = brute_viterbi(emis, T, s, e, allowed_start, allowed_trans)
            got = viterbi(model, chunk, constrain=True)
            assert [bio.TAG_INDEX[t] for t in got] == list(best_path)

    def test_empty_chunk_rejected(self):
        model = random_model(np.random.default_rng(0), ["a"])
        empty = Chunk(
            doc_id="d", chunk_index=0, tokens=(), positions=(),
            doc_token_start=0, doc_token_count=0,
        )
        with pytest.raises(ModelError):
            viterbi(model, empty)


class TestLogPartition:
    def test_zero_weight_model_gives_n_log_7(self):
        for n in (1, 2, 5, 30):
            words = [f"w{i}" for i in range(n)]
            model = model_from_arrays(
                words, {}, np.zeros((N_TAGS, N_TAGS)), np.zeros(N_TAGS), np.zeros(N_TAGS)
            )
            assert log_partition(model, words_chunk(words)) == pytest.approx(
                n * math.log(7), abs=1e-12
            )

    def test_matches_enumeration(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 4))
            words = [f"w{rng.integers(0, 3)}" for _ in range(n)]
            model = random_model(rng, words)
            chunk = words_chunk(words)
            emis, T, s, e = model_arrays_for_chunk(model, chunk)
            assert log_partition(model, chunk) == pytest.approx(
                brute_logz(emis, T, s, e), abs=1e-9
            )

    def test_upper_bounds_any_path_score(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 6))
            words = [f"w{rng.integers(0, 4)}" for _ in range(n)]
            model = random_model(rng, words)
            chunk = words_chunk(words)
            tags = [bio.TAGS[int(rng.integers(0, N_TAGS))] for _ in range(n)]
            assert log_partition(model, chunk) >= score_path(model, chunk, tags)

    def test_path_probabilities_sum_to_one(self, rng):
        import itertools

        for _ in range(30):
            n = int(rng.integers(1, 4))
            words = [f"w{rng.integers(0, 3)}" for _ in range(n)]
            model = random_model(rng, words)
            chunk = words_chunk(words)
            logz = log_partition(model, chunk)
            total = math.fsum(
                math.exp(score_path(model, chunk, list(path)) - logz)
                for path in itertools.product(bio.TAGS, repeat=n)
            )
            assert total == pytest.approx(1.0, abs=1e-9)


def synth_training_chunks(n_docs=12, seed=3, **cfg):
    docs = generate(separable_config(n_docs=n_docs, seed=seed, **cfg))
    return make_training_chunks(docs, window=1024)


class TestPerceptron:
    def test_memorizes_single_sequence(self):
        chunk = words_chunk(
            ["HELD", "appeal", "allowed", "because", "reasons", "given"],
            tags=["B-Conclusion", "I-Conclusion", "I-Conclusion", "B-Reason",
                  "I-Reason", "I-Reason"],
        )
        config = TrainConfig(algorithm="perceptron", epochs=20, seed=0,
                             class_weights="uniform")
        model = train_perceptron([chunk], config, MINIMAL)
        assert viterbi(model, chunk) == list(chunk.tags)

    def test_separable_corpus_reaches_perfect_training_accuracy(self):
        chunks = synth_training_chunks()
        config = TrainConfig(algorithm="perceptron", epochs=10, seed=1,
                             class_weights="uniform")
        model = train_perceptron(chunks, config)
        wrong = 0
        total = 0
        for chunk in chunks:
            got = viterbi(model, chunk)
            wrong += sum(1 for a, b in zip(got, chunk.tags) if a != b)
            total += len(chunk.tags)
        assert total > 0 and wrong == 0

    def test_two_runs_bit_identical(self):
        chunks = synth_training_chunks(n_docs=6)
        config = TrainConfig(algorithm="perceptron", epochs=4, seed=9)
        a = train_perceptron(chunks, config)
        b = train_perceptron(chunks, config)
        np.testing.assert_array_equal(a.emission, b.emission)
        np.testing.assert_array_equal(a.transition, b.transition)
        np.testing.assert_array_equal(a.start, b.start)
        np.testing.assert_array_equal(a.stop, b.stop)

    def test_doubled_class_weights_leave_predictions_unchanged(self):
        chunks = synth_training_chunks(n_docs=6, seed=11)
        base = resolve_class_weights("inverse", chunks)
        doubled = {t: 2.0 * w for t, w in base.items()}  # exact x2 in float
        m1 = train_perceptron(chunks, TrainConfig(epochs=4, seed=2, class_weights=base))
        m2 = train_perceptron(chunks, TrainConfig(epochs=4, seed=2, class_weights=doubled))
        np.testing.assert_array_equal(2.0 * m1.emission, m2.emission)
        for chunk in chunks:
            assert viterbi(m1, chunk) == viterbi(m2, chunk)

    def test_empty_corpus_rejected(self):
        with pytest.raises(ModelError):
            train_perceptron([], TrainConfig())

    def test_chunk_without_tags_rejected(self):
        with pytest.raises(ModelError):
            train_perceptron([words_chunk(["a"])], TrainConfig())


class TestCrf:
    def small_instance(self, rng, n_max=4):
        n = int(rng.integers(1, n_max + 1))
        words = [f"w{rng.integers(0, 4)}" for _ in range(n)]
        tags = [bio.TAGS[int(rng.integers(0, N_TAGS))] for _ in range(n)]
        return words_chunk(words, tags=tags)

    def test_gradient_matches_finite_differences(self, rng):
        from argmine.features import chunk_csr
        from argmine.kernels import crf_chunk_grad

        for _ in range(50):
            chunk = self.small_instance(rng)
            model = random_model(rng, [t.text for t in chunk.tokens], scale=0.5)
            indptr, indices = chunk_csr(chunk, model.feature_config, model.feature_index)
            gold = np.asarray([bio.TAG_INDEX[t] for t in chunk.tags], dtype=np.int64)
            cw = rng.uniform(0.3, 3.0, N_TAGS)
            W, T, s, e = model.emission, model.transition, model.start, model.stop
            dW = np.zeros_like(W)
            dT = np.zeros_like(T)
            ds = np.zeros_like(s)
            de = np.zeros_like(e)
            crf_chunk_grad(indptr, indices, W, T, s, e, gold, cw, dW, dT, ds, de)
            analytic = np.concatenate([a.ravel() for a in (dW, dT, ds, de)])

            def loss():
                z = [np.zeros_like(W), np.zeros_like(T), np.zeros_like(s), np.zeros_like(e)]
                return crf_chunk_grad(indptr, indices, W, T, s, e, gold, cw, *z)

            numeric = fd_gradient(loss, [W, T, s, e], h=1e-5)
            rel = np.linalg.norm(analytic - numeric) / max(np.linalg.norm(numeric), 1e-12)
            assert rel <= 1e-4

    def test_uniform_weights_reproduce_plain_nll(self, rng):
        from argmine.features import chunk_csr
        from argmine.kernels import crf_chunk_grad

        for _ in range(30):
            chunk = self.small_instance(rng, n_max=3)
            model = random_model(rng, [t.text for t in chunk.tokens])
            indptr, indices = chunk_csr(chunk, model.feature_config, model.feature_index)
            gold = np.asarray([bio.TAG_INDEX[t] for t in chunk.tags], dtype=np.int64)
            z = [np.zeros_like(model.emission), np.zeros((N_TAGS, N_TAGS)),
                 np.zeros(N_TAGS), np.zeros(N_TAGS)]
            loss = crf_chunk_grad(
                indptr, indices, model.emission, model.transition, model.start,
                model.stop, gold, np.ones(N_TAGS), *z,
            )
            nll = log_partition(model, chunk) - score_path(model, chunk, list(chunk.tags))
            assert loss == pytest.approx(nll, abs=1e-9)

    def test_weighted_loss_matches_enumeration(self, rng):
        from argmine.features import chunk_csr
        from argmine.kernels import crf_chunk_grad

        for _ in range(20):
            chunk = self.small_instance(rng, n_max=3)
            model = random_model(rng, [t.text for t in chunk.tokens])
            indptr, indices = chunk_csr(chunk, model.feature_config, model.feature_index)
            gold = np.asarray([bio.TAG_INDEX[t] for t in chunk.tags], dtype=np.int64)
            cw = rng.uniform(0.3, 3.0, N_TAGS)
            z = [np.zeros_like(model.emission), np.zeros((N_TAGS, N_TAGS)),
                 np.zeros(N_TAGS), np.zeros(N_TAGS)]
            loss = crf_chunk_grad(
                indptr, indices, model.emission, model.transition, model.start,
                model.stop, gold, cw, *z,
            )
            emis, T, s, e = model_arrays_for_chunk(model, chunk)
            ref = brute_weighted_loss(emis, T, s, e, gold.tolist(), cw)
            assert loss == pytest.approx(ref, abs=1e-9)

    def test_zero_weights_give_weighted_log_path_count(self, rng):
        # the strong-regularization limit: at w = 0 each token contributes
        # class_weight * log(7), a weighted version of log 7^n
        from argmine.features import chunk_csr
        from argmine.kernels import crf_chunk_grad

        chunk = self.small_instance(rng, n_max=4)
        n = len(chunk.tokens)
        model = random_model(rng, [t.text for t in chunk.tokens], scale=0.0)
        indptr, indices = chunk_csr(chunk, model.feature_config, model.feature_index)
        gold = np.asarray([bio.TAG_INDEX[t] for t in chunk.tags], dtype=np.int64)
        cw = rng.uniform(0.3, 3.0, N_TAGS)
        z = [np.zeros_like(model.emission), np.zeros((N_TAGS, N_TAGS)),
             np.zeros(N_TAGS), np.zeros(N_TAGS)]
        loss = crf_chunk_grad(
            indptr, indices, model.emission, model.transition, model.start,
            model.stop, gold, cw, *z,
        )
        expected = sum(cw[g] for g in gold) * math.log(7)
        assert loss == pytest.approx(expected, abs=1e-9)
        uniform = crf_chunk_grad(
            indptr, indices, model.emission, model.transition, model.start,
            model.stop, gold, np.ones(N_TAGS),
            *[np.zeros_like(a) for a in (model.emission, model.transition,
                                         model.start, model.stop)],
        )
        assert uniform == pytest.approx(n * math.log(7), abs=1e-12)

    def test_scaling_class_weights_scales_data_term(self, rng):
        # asserted at l2 = 0: doubling every class weight doubles loss and
        # gradient exactly
        from argmine.features import chunk_csr
        from argmine.kernels import crf_chunk_grad

        chunk = self.small_instance(rng)
        model = random_model(rng, [t.text for t in chunk.tokens])
        indptr, indices = chunk_csr(chunk, model.feature_config, model.feature_index)
        gold = np.asarray([bio.TAG_INDEX[t] for t in chunk.tags], dtype=np.int64)
        cw = rng.uniform(0.3, 3.0, N_TAGS)
        g1 = [np.zeros_like(model.emission), np.zeros((N_TAGS, N_TAGS)),
              np.zeros(N_TAGS), np.zeros(N_TAGS)]
        g2 = [np.zeros_like(a) for a in g1]
        l1 = crf_chunk_grad(indptr, indices, model.emission, model.transition,
                            model.start, model.stop, gold, cw, *g1)
        l2 = crf_chunk_grad(indptr, indices, model.emission, model.transition,
                            model.start, model.stop, gold, 2.0 * cw, *g2)
        assert l2 == 2.0 * l1
        for a, b in zip(g1, g2):
            np.testing.assert_array_equal(2.0 * a, b)

    def test_training_learns_separable_corpus(self):
        chunks = synth_training_chunks(n_docs=8, seed=4)
        config = TrainConfig(algorithm="crf", epochs=12, learning_rate=0.2,
                             seed=5, l2=0.0)
        model = train_crf(chunks, config)
        wrong = total = 0
        for chunk in chunks:
            got = viterbi(model, chunk)
            wrong += sum(1 for a, b in zip(got, chunk.tags) if a != b)
            total += len(chunk.tags)
        assert wrong / total < 0.02

    def test_loss_decreases(self):
        chunks = synth_training_chunks(n_docs=5, seed=6)
        config = TrainConfig(algorithm="crf", epochs=6, learning_rate=0.1, seed=0)
        model = train_crf(chunks, config)
        losses = model.metadata["data_loss_per_epoch"]
        assert losses[-1] < losses[0]

    def test_determinism(self):
        chunks = synth_training_chunks(n_docs=4, seed=8)
        config = TrainConfig(algorithm="crf", epochs=3, seed=21)
        a = train_crf(chunks, config)
        b = train_crf(chunks, config)
        np.testing.assert_array_equal(a.emission, b.emission)
        np.testing.assert_array_equal(a.transition, b.transition)

    def test_l2_shrinks_weights(self):
        chunks = synth_training_chunks(n_docs=4, seed=8)
        small = train_crf(
            chunks,
            TrainConfig(algorithm="crf", epochs=5, seed=1, learning_rate=0.05, l2=0.0),
        )
        big = train_crf(
            chunks,
            TrainConfig(algorithm="crf", epochs=5, seed=1, learning_rate=0.05, l2=10.0),
        )
        assert np.linalg.norm(big.emission) < np.linalg.norm(small.emission)


class TestClassWeights:
    def test_inverse_frequency_formula(self):
        chunk = words_chunk(
            ["a", "b", "c", "d"], tags=["O", "O", "O", "B-Issue"]
        )
        weights = resolve_class_weights("inverse", [chunk])
        assert weights["O"] == pytest.approx(4 / (7 * 3))
        assert weights["B-Issue"] == pytest.approx(4 / (7 * 1))
        assert weights["I-Reason"] == 1.0  # absent tag

    def test_uniform(self):
        chunk = words_chunk(["a"], tags=["O"])
        assert set(resolve_class_weights("uniform", [chunk]).values()) == {1.0}

    def test_bad_mapping_rejected(self):
        with pytest.raises(ModelError):
            TrainConfig(class_weights={"O": -1.0})
        with pytest.raises(ModelError):
            TrainConfig(class_weights={"B-Nope": 1.0})


class TestPredict:
    def test_training_document_of_memorization_case_predicted_exactly(self):
        # single training document, enough epochs: the model memorizes it
        [doc] = generate(separable_config(n_docs=1, seed=14))
        chunks = make_training_chunks([doc], window=1024)
        # enough epochs that the mistake-free late weights dominate the average
        model = train_perceptron(
            chunks, TrainConfig(epochs=60, seed=0, class_weights="uniform")
        )
        predicted = predict_document(model, doc)
        for sentence, original in zip(predicted.sentences, doc.sentences):
            assert sentence.pred_tags == tuple(bio.encode(original))
            assert sentence.pred_spans == original.spans
            assert sentence.spans == original.spans  # gold untouched

    def test_empty_document(self):
        docs = generate(separable_config(n_docs=2, seed=14))
        model = train_perceptron(make_training_chunks(docs), TrainConfig(epochs=2, seed=0))
        empty = Document("empty", "summary", ())
        assert predict_document(model, empty) is empty

    def test_small_window_reconstructs_spans(self):
        # training and prediction share the window, so chunk boundaries
        # bisect spans the same way in both; i_as_b decode must rejoin them
        docs = generate(separable_config(n_docs=4, seed=15))
        chunks = make_training_chunks(docs, window=5)
        model = train_perceptron(
            chunks, TrainConfig(epochs=10, seed=0, class_weights="uniform")
        )
        doc = docs[0]
        windowed = predict_document(model, doc, window=5)
        for sentence, original in zip(windowed.sentences, doc.sentences):
            assert sentence.pred_spans == original.spans


class TestModelFile:
    def test_round_trip(self, tmp_path):
        chunks = synth_training_chunks(n_docs=3, seed=2)
        model = train_perceptron(chunks, TrainConfig(epochs=2, seed=3))
        path = tmp_path / "m.bin"
        save_model(model, path)
        loaded = load_model(path)
        assert loaded.feature_names == model.feature_names
        assert loaded.tags == model.tags
        assert loaded.feature_config == model.feature_config
        assert loaded.train_config == model.train_config
        np.testing.assert_array_equal(loaded.emission, model.emission)
        np.testing.assert_array_equal(loaded.transition, model.transition)
        np.testing.assert_array_equal(loaded.start, model.start)
        np.testing.assert_array_equal(loaded.stop, model.stop)
        # loaded model predicts identically
        chunk = chunks[0]
        assert viterbi(loaded, chunk) == viterbi(model, chunk)

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "bad.bin"
        path.write_bytes(b"NOTAMODEL")
        with pytest.raises(ModelError):
            load_model(path)

    def test_truncated_file_rejected(self, tmp_path):
        chunks = synth_training_chunks(n_docs=2, seed=2)
        model = train_perceptron(chunks, TrainConfig(epochs=1, seed=3))
        path = tmp_path / "m.bin"
        save_model(model, path)
        data = path.read_bytes()
        path.write_bytes(data[: len(data) - 64])
        with pytest.raises(ModelError):
            load_model(path)


def test_train_tagger_dispatches():
    chunks = synth_training_chunks(n_docs=3, seed=1)
    assert train_tagger(chunks, TrainConfig(algorithm="perceptron", epochs=1, seed=0)).metadata[
        "algorithm"
    ] == "perceptron"
    assert train_tagger(chunks, TrainConfig(algorithm="crf", epochs=1, seed=0)).metadata[
        "algorithm"
    ] == "crf"

"""Evaluation experiments: n-gram overlap, robustness curves, sweeps."""

import numpy as np
import pytest

import nextword as nw


class TestNgramSimilarity:
    def test_hand_enumerated_case(self):
        report = nw.ngram_similarity([1, 2, 3, 4], [2, 3, 4, 5], 2)
        assert (report.matched, report.total) == (2, 3)
        assert report.ratio == pytest.approx(2 / 3)

    def test_self_comparison(self):
        rng = np.random.default_rng(0)
        for n in (1, 2, 4):
            ids = rng.integers(1, 9, 40).tolist()
            report = nw.ngram_similarity(ids, ids, n)
            assert report.matched == report.total
            assert report.ratio == 1.0

    def test_disjoint_vocabularies(self):
        report = nw.ngram_similarity([1, 1, 2], [3, 4, 3], 1)
        assert report.matched == 0 and report.ratio == 0.0

    def test_multiplicity_counted(self):
        report = nw.ngram_similarity([1, 2, 1, 2, 1], [1, 2], 2)
        # generated bigrams: (1,2) (2,1) (1,2) (2,1); only (1,2) is in the reference
        assert (report.matched, report.total) == (2, 4)

    def test_relabeling_invariance(self):
        rng = np.random.default_rng(1)
        gen = rng.integers(1, 7, 30).tolist()
        ref = rng.integers(1, 7, 50).tolist()
        perm = {i: i + 100 for i in range(7)}
        for n in (1, 3):
            a = nw.ngram_similarity(gen, ref, n)
            b = nw.ngram_similarity([perm[i] for i in gen], [perm[i] for i in ref], n)
            assert (a.matched, a.total) == (b.matched, b.total)

    def test_bad_n(self):
        with pytest.raises(ValueError):
            nw.ngram_similarity([1, 2], [1, 2], 0)


def loop_accuracy(params, windows):
    """Window-by-window oracle, independent of the batched evaluation path."""
    hits = 0
    for i in range(len(windows)):
        ctx, tgt = windows[i]
        probs, _ = nw.forward(params, ctx)
        if int(np.argmax(probs)) == tgt:
            hits += 1
    return hits / len(windows)


class TestRobustness:
    def test_zero_fraction_equals_standalone_accuracy(self, tiny_model):
        report = nw.robustness_curve(
            tiny_model.params, tiny_model.windows, [0.0], np.random.default_rng(0)
        )
        assert report.accuracy[0] == loop_accuracy(tiny_model.params, tiny_model.windows)

    def test_full_masking_is_constant_prediction(self, tiny_model):
        report = nw.robustness_curve(
            tiny_model.params, tiny_model.windows, [1.0], np.random.default_rng(0)
        )
        blank = np.full(tiny_model.cfg.context_length, nw.UNKNOWN_ID)
        probs, _ = nw.forward(tiny_model.params, blank)
        constant = int(np.argmax(probs))
        expected = float(np.mean(tiny_model.windows.targets == constant))
        assert report.accuracy[0] == pytest.approx(expected)

    def test_more_masking_hurts_on_overfit_model(self, tiny_model):
        report = nw.robustness_curve(
            tiny_model.params, tiny_model.windows, [0.2, 0.8], np.random.default_rng(3)
        )
        assert report.accuracy[0] >= report.accuracy[1]

    def test_fraction_validation(self, tiny_model):
        with pytest.raises(ValueError):
            nw.robustness_curve(tiny_model.params, tiny_model.windows, [1.5], np.random.default_rng(0))

    def test_report_shapes(self, tiny_model):
        fractions = [0.0, 0.3, 0.6]
        report = nw.robustness_curve(
            tiny_model.params, tiny_model.windows, fractions, np.random.default_rng(1)
        )
        assert report.missing_fractions == fractions
        assert len(report.accuracy) == 3
        assert all(0.0 <= a <= 1.0 for a in report.accuracy)


def sweep_config(length, seed=5):
    return nw.NetworkConfig(
        context_length=length,
        hidden_size=8,
        embedding_dim=8,
        dropout_rate=0.1,
        learning_rate=1e-3,
        epochs=2,
        batch_size=8,
        seed=seed,
    )


@pytest.fixture(scope="module")
def corpus(demo_text):
    toks = nw.tokenize(demo_text)[:120]
    return nw.encode(toks, nw.build_vocabulary(toks))


class TestSweep:
    def test_one_row_per_config(self, corpus):
        rows = nw.sweep(
            [sweep_config(1), sweep_config(2), sweep_config(4)],
            corpus,
            glove_cfg=nw.GloveConfig(dim=8, epochs=3, seed=0),
            sample_words=30,
            ngram_sizes=range(1, 4),
        )
        assert len(rows) == 3
        for row in rows:
            assert row.error is None
            assert 0.0 <= row.accuracy <= 1.0
            assert [r.n for r in row.similarity] == [1, 2, 3]

    def test_deterministic_rows(self, corpus):
        def run():
            return nw.sweep(
                [sweep_config(2)],
                corpus,
                glove_cfg=nw.GloveConfig(dim=8, epochs=3, seed=0),
                sample_words=25,
                ngram_sizes=range(1, 3),
            )

        a, b = run(), run()
        assert a[0].accuracy == b[0].accuracy
        assert [(r.matched, r.total) for r in a[0].similarity] == [
            (r.matched, r.total) for r in b[0].similarity
        ]

    def test_failures_annotated_per_row(self, corpus):
        rows = nw.sweep(
            [sweep_config(2), sweep_config(999)],  # second is longer than the corpus
            corpus,
            glove_cfg=nw.GloveConfig(dim=8, epochs=3, seed=0),
            sample_words=20,
            ngram_sizes=range(1, 3),
        )
        assert rows[0].error is None
        assert rows[1].error is not None
        assert rows[1].accuracy is None


class TestCsvWriters:
    def test_similarity_csv(self, tmp_path):
        reports = [nw.ngram_similarity([1, 2, 3, 4], [2, 3, 4, 5], n) for n in (1, 2)]
        path = tmp_path / "sim.csv"
        nw.evaluation.write_similarity_csv(reports, str(path))
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "n,matched,total,ratio"
        assert len(lines) == 3

    def test_robustness_csv(self, tmp_path, tiny_model):
        report = nw.robustness_curve(
            tiny_model.params, tiny_model.windows, [0.0, 0.5], np.random.default_rng(0)
        )
        path = tmp_path / "rob.csv"
        nw.evaluation.write_robustness_csv(report, str(path))
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "fraction,accuracy"
        assert len(lines) == 3

    def test_sweep_csv(self, tmp_path, corpus):
        rows = nw.sweep(
            [sweep_config(2), sweep_config(999)],
            corpus,
            glove_cfg=nw.GloveConfig(dim=8, epochs=3, seed=0),
            sample_words=20,
            ngram_sizes=range(1, 3),
        )
        path = tmp_path / "sweep.csv"
        nw.evaluation.write_sweep_csv(rows, str(path))
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "context_length,hidden_size,dropout_rate,accuracy,error,ratio_1,ratio_2"
        assert len(lines) == 3
        assert "shorter than context" in lines[2]

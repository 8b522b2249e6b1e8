"""Shared fixtures: the shipped demo corpus and two overfit models.

``tiny_model`` is a fast, fully-memorized model for engine/server/CLI tests.
``overfit_model`` mirrors the published training result at desk scale and is
expensive, so both are session-scoped.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from importlib import resources

import numpy as np
import pytest
from hypothesis import settings

import nextword as nw

settings.register_profile("suite", deadline=None)
settings.load_profile("suite")

TINY_TEXT = (
    "the quick brown fox jumps over the lazy dog . "
    "a quick silver fish swims under the old wooden bridge . "
    "the hungry grey wolf runs across the frozen white field . "
    "every bright summer morning the children walk to the quiet village school . "
)


@dataclass
class TrainedModel:
    text: str
    tokens: list
    vocab: nw.Vocabulary
    corpus: nw.EncodedCorpus
    windows: nw.Windows
    embedding: np.ndarray
    cfg: nw.NetworkConfig
    params: nw.NetworkParams
    history: nw.TrainHistory
    build_seconds: float  # embeddings plus network training

    def engine(self) -> nw.Engine:
        return nw.Engine(self.vocab, self.params, self.cfg)


def _train_model(text: str, glove_cfg: nw.GloveConfig, cfg: nw.NetworkConfig, early_stop) -> TrainedModel:
    start = time.monotonic()
    tokens = nw.tokenize(text)
    vocab = nw.build_vocabulary(tokens)
    corpus = nw.encode(tokens, vocab)
    embedding = nw.glove_fit(nw.build_cooccurrence(corpus, glove_cfg.window), glove_cfg)
    windows = nw.make_windows(corpus, cfg.context_length)
    params, history = nw.train(windows, embedding, cfg, early_stop=early_stop)
    elapsed = time.monotonic() - start
    return TrainedModel(
        text, tokens, vocab, corpus, windows, embedding, cfg, params, history, elapsed
    )


@pytest.fixture(scope="session")
def demo_text() -> str:
    return resources.files("nextword.data").joinpath("demo_corpus.txt").read_text("utf-8")


@pytest.fixture(scope="session")
def tiny_model() -> TrainedModel:
    glove_cfg = nw.GloveConfig(dim=16, window=5, epochs=30, seed=1)
    cfg = nw.NetworkConfig(
        context_length=3,
        hidden_size=32,
        embedding_dim=16,
        dropout_rate=0.0,
        learning_rate=1e-2,
        epochs=800,
        batch_size=16,
        seed=1,
    )
    model = _train_model(
        TINY_TEXT, glove_cfg, cfg, lambda h: h.accuracy[-1] == 1.0 and h.loss[-1] < 0.05
    )
    assert model.history.accuracy[-1] == 1.0, "tiny corpus must memorize fully"
    return model


@pytest.fixture(scope="session")
def tiny_engine(tiny_model) -> nw.Engine:
    return tiny_model.engine()


@pytest.fixture(scope="session")
def overfit_model(demo_text) -> TrainedModel:
    # Desk-scale mirror of the published run: shipped ~500-token corpus,
    # H=64, L=6, dropout 0.2, Adam lr 1e-3, at most 300 epochs. The corpus is
    # tiny, so the embeddings need more fitting epochs than the phase-one
    # defaults to reach useful magnitudes.
    glove_cfg = nw.GloveConfig(dim=100, epochs=300, seed=0)
    cfg = nw.NetworkConfig(
        context_length=6,
        hidden_size=64,
        embedding_dim=100,
        dropout_rate=0.2,
        learning_rate=1e-3,
        epochs=300,
        batch_size=4,
        seed=0,
    )
    return _train_model(
        demo_text,
        glove_cfg,
        cfg,
        lambda h: h.accuracy[-1] >= 0.95 and h.loss[-1] < 0.1 * h.loss[0],
    )

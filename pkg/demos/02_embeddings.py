"""Phase one of training: fit word vectors on co-occurrence counts.

Run from the repository root:  python3 demos/02_embeddings.py  (~20 s)
"""

from importlib import resources

import numpy as np

import nextword as nw
from nextword.glove import glove_fit_params

text = resources.files("nextword.data").joinpath("demo_corpus.txt").read_text("utf-8")
tokens = nw.tokenize(text)
vocab = nw.build_vocabulary(tokens)
corpus = nw.encode(tokens, vocab)

cfg = nw.GloveConfig(dim=32, window=8, epochs=250, learning_rate=0.2, seed=0)
cooc = nw.build_cooccurrence(corpus, cfg.window)
print(f"co-occurrence entries: {len(cooc)} (window {cfg.window}, 1/distance weighting)")

params, history = glove_fit_params(cooc, cfg)
print(f"objective: {history[0]:.1f} -> {history[-1]:.2f} after {cfg.epochs} epochs")

emb = params.w + params.w_ctx
emb[nw.UNKNOWN_ID] = 0.0

# nearest neighbours (cosine) among the more frequent words
frequent = [i for i in range(1, len(vocab)) if vocab.counts[i] >= 3 and vocab.words[i] not in nw.KEPT_PUNCT]
norms = np.linalg.norm(emb, axis=1)


def neighbours(word, k=4):
    i = vocab.index[word]
    sims = emb @ emb[i] / np.maximum(norms * norms[i], 1e-12)
    ranked = [j for j in np.argsort(-sims) if j != i and j in frequent]
    return [vocab.word_of(j) for j in ranked[:k]]


for word in ("sea", "water", "streets", "me"):
    if word in vocab.index:
        print(f"{word:>10} ~ {neighbours(word)}")

"""The order-3 Markov chain baseline, next to the network's output.

Run from the repository root:  python3 demos/05_markov_baseline.py
"""

from importlib import resources

import numpy as np

import nextword as nw

text = resources.files("nextword.data").joinpath("demo_corpus.txt").read_text("utf-8")
tokens = nw.tokenize(text)
vocab = nw.build_vocabulary(tokens)
corpus = nw.encode(tokens, vocab)

model = nw.markov_train(corpus.ids, order=3)
full_contexts = sum(len(c) == 3 for c in model.counts)
print(f"markov order 3: {full_contexts} distinct 3-word contexts")

ctx = corpus.ids[:3].tolist()
dist = nw.markov_next(model, ctx)
print("context:", [vocab.word_of(i) for i in ctx])
for word_id, p in sorted(dist.items(), key=lambda kv: -kv[1])[:3]:
    print(f"  next {vocab.word_of(word_id)!r}  p={p:.3f}")
print()

rng = np.random.default_rng(0)
sample_ids = nw.markov_generate(model, corpus.ids[:3].tolist(), 60, rng)
sample = nw.detokenize(
    [nw.Token(vocab.word_of(i), nw.TokenKind.PUNCT if vocab.word_of(i) in nw.KEPT_PUNCT else nw.TokenKind.WORD)
     for i in sample_ids]
)
print("sampled continuation:")
print(sample)
print()

# How much of the sampled text is lifted verbatim from the corpus?
for n in (1, 2, 3, 4):
    report = nw.ngram_similarity(sample_ids, corpus.ids, n)
    print(f"{n}-grams found in corpus: {report.matched}/{report.total} ({report.ratio:.2f})")

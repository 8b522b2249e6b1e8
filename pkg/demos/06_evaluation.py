"""Evaluation experiments: robustness to missing words and a context sweep.

Loads demo_model.dtng (run demos/03_train_and_suggest.py first). The sweep
trains one small model per context length, so expect a couple of minutes.

Run from the repository root:  python3 demos/06_evaluation.py
"""

import os
import sys
from dataclasses import replace

import numpy as np

import nextword as nw
from nextword.evaluation import format_robustness_table, format_similarity_table

if not os.path.exists("demo_model.dtng"):
    sys.exit("demo_model.dtng not found - run demos/03_train_and_suggest.py first")

engine = nw.load_model("demo_model.dtng")
from importlib import resources

text = resources.files("nextword.data").joinpath("demo_corpus.txt").read_text("utf-8")
corpus = nw.encode(nw.tokenize(text), engine.vocab)
windows = nw.make_windows(corpus, engine.cfg.context_length)

print("accuracy as input words go missing (masked with the unknown sentinel):")
report = nw.robustness_curve(
    engine.net, windows, [0.0, 0.1, 0.2, 0.4, 0.6, 0.8], np.random.default_rng(0)
)
print(format_robustness_table(report))
print()

print("context-length sweep (small models, seeded):")
base = nw.NetworkConfig(
    hidden_size=24, embedding_dim=24, dropout_rate=0.1,
    learning_rate=5e-3, epochs=25, batch_size=8, seed=0, context_length=1,
)
configs = [replace(base, context_length=length) for length in (1, 2, 4, 6)]
rows = nw.sweep(
    configs,
    corpus,
    glove_cfg=nw.GloveConfig(dim=24, epochs=150, learning_rate=0.2, seed=0),
    sample_words=300,
    ngram_sizes=range(1, 5),
)
for row in rows:
    if row.error:
        print(f"L={row.config.context_length}: failed ({row.error})")
        continue
    print(f"L={row.config.context_length}  accuracy {row.accuracy:.3f}")
    print(format_similarity_table(row.similarity))
    print()

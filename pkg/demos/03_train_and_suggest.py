"""Phase two: train the 6-layer predictor, then ask it for suggestions.

Deliberately small so it finishes in about a minute; bump epochs/hidden for
better numbers. Saves demo_model.dtng for the later demos.

Run from the repository root:  python3 demos/03_train_and_suggest.py
"""

from importlib import resources

import nextword as nw

text = resources.files("nextword.data").joinpath("demo_corpus.txt").read_text("utf-8")
tokens = nw.tokenize(text)
vocab = nw.build_vocabulary(tokens)
corpus = nw.encode(tokens, vocab)

glove_cfg = nw.GloveConfig(dim=48, epochs=250, learning_rate=0.2, seed=0)
print("fitting embeddings...")
embedding = nw.glove_fit(nw.build_cooccurrence(corpus, glove_cfg.window), glove_cfg)

cfg = nw.NetworkConfig(
    context_length=4,
    hidden_size=48,
    embedding_dim=48,
    dropout_rate=0.1,
    learning_rate=5e-3,
    epochs=80,
    batch_size=8,
    seed=0,
)
windows = nw.make_windows(corpus, cfg.context_length)
print(f"training on {len(windows)} windows...")
params, history = nw.train(
    windows,
    embedding,
    cfg,
    log=lambda e, loss, acc: e % 10 == 0 and print(f"  epoch {e:3d}  loss {loss:.3f}  acc {acc:.3f}"),
)

engine = nw.Engine(vocab, params, cfg)
nw.save_model("demo_model.dtng", engine)
print("saved demo_model.dtng")
print()

# The writing flow: substitution first, then suggestion.
for text_in in ("call me", "i thought i would sail", "whenever i find myselv"):
    subs, suggestions = engine.suggest_detailed(text_in, 3)
    print(f"writer typed: {text_in!r}")
    for frm, to in subs:
        print(f"  substituted {frm!r} -> {to!r}")
    for s in suggestions:
        print(f"  suggest {s.word!r}  p={s.probability:.3f}")
    print()

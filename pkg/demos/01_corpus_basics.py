"""Corpus handling: tokenization, vocabulary, windows and spell-matching.

Run from the repository root:  python3 demos/01_corpus_basics.py
"""

from importlib import resources

import nextword as nw

text = resources.files("nextword.data").joinpath("demo_corpus.txt").read_text("utf-8")

# Tokenization keeps periods, commas, semicolons and question marks as their
# own tokens, keeps apostrophes attached, lowercases, and deletes the rest.
sample = "Call me Ishmael. Some years ago - never mind how long, precisely!"
tokens = nw.tokenize(sample)
print("input:   ", sample)
print("tokens:  ", [t.text for t in tokens])
print("restored:", nw.detokenize(tokens))
print()

corpus_tokens = nw.tokenize(text)
vocab = nw.build_vocabulary(corpus_tokens)
print(f"demo corpus: {len(corpus_tokens)} tokens, vocabulary size {len(vocab)}")
print("first words by id:", vocab.words[:8])

encoded = nw.encode(corpus_tokens, vocab)
windows = nw.make_windows(encoded, 6)
print(f"{len(windows)} training windows of 6 words each")
ctx, target = windows[0]
print("first window:", [vocab.word_of(int(i)) for i in ctx], "->", vocab.word_of(target))
print()

# The dictionary lookup behind the substitution phase.
for typo in ("ishmale", "streetz", "whenevr"):
    print(f"nearest_word({typo!r}) = {nw.nearest_word(typo, vocab)!r}")
print("levenshtein('kitten', 'sitting') =", nw.levenshtein("kitten", "sitting"))

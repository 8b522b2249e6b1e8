"""Corpus ingestion: tokenization, vocabulary, id encoding and edit distance.

The tokenizer keeps only letters, digits and apostrophes inside words plus the
four punctuation marks ``. , ; ?`` as standalone tokens; every other character
is deleted in place. All output is lowercased.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

KEPT_PUNCT = (".", ",", ";", "?")

UNKNOWN_WORD = "<unk>"
UNKNOWN_ID = 0


class TokenKind(Enum):
    WORD = "word"
    PUNCT = "punct"


@dataclass(frozen=True)
class Token:
    text: str
    kind: TokenKind

    @property
    def is_punct(self) -> bool:
        return self.kind is TokenKind.PUNCT


def word_token(text: str) -> Token:
    return Token(text, TokenKind.WORD)


def punct_token(text: str) -> Token:
    return Token(text, TokenKind.PUNCT)


def tokenize(text: str) -> list[Token]:
    """Split text into lowercase word and punctuation tokens.

    Characters other than letters, digits, apostrophes, whitespace and the
    kept punctuation marks are deleted without breaking the surrounding word.
    Kept marks become standalone punct tokens; apostrophes stay attached to
    the word they touch, and a bare run of apostrophes is dropped.
    """
    tokens: list[Token] = []
    word: list[str] = []

    def flush() -> None:
        if word:
            text = "".join(word)
            if text.strip("'"):
                tokens.append(Token(text, TokenKind.WORD))
            word.clear()

    for ch in text.lower():
        if ch == "'" or ch.isalnum():
            word.append(ch)
        elif ch in KEPT_PUNCT:
            flush()
            tokens.append(Token(ch, TokenKind.PUNCT))
        elif ch.isspace():
            flush()
        # anything else is eliminated in place
    flush()
    return tokens


def detokenize(tokens: Sequence[Token]) -> str:
    """Render tokens as text: single spaces between words, punctuation attached."""
    parts: list[str] = []
    for tok in tokens:
        if parts and tok.kind is not TokenKind.PUNCT:
            parts.append(" ")
        parts.append(tok.text)
    return "".join(parts)


@dataclass
class Vocabulary:
    """Bijection between token texts and dense integer ids.

    Id 0 is the unknown sentinel; corpus words follow in first-appearance
    order. ``counts`` holds corpus frequencies (0 for the sentinel), used to
    break ties in :func:`nearest_word`.
    """

    words: list[str]
    index: dict[str, int]
    counts: list[int]

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def id_of(self, word: str) -> int:
        return self.index.get(word, UNKNOWN_ID)

    def word_of(self, idx: int) -> str:
        return self.words[idx]

    def punct_ids(self) -> set[int]:
        return {self.index[p] for p in KEPT_PUNCT if p in self.index}


def build_vocabulary(tokens: Sequence[Token]) -> Vocabulary:
    """Collect distinct token texts (plus the unknown sentinel at id 0)."""
    if not tokens:
        raise ValueError("empty corpus")
    words = [UNKNOWN_WORD]
    counts = [0]
    index = {UNKNOWN_WORD: UNKNOWN_ID}
    for tok in tokens:
        i = index.get(tok.text)
        if i is None:
            index[tok.text] = len(words)
            words.append(tok.text)
            counts.append(1)
        else:
            counts[i] += 1
    return Vocabulary(words, index, counts)


def export_vocabulary(vocab: Vocabulary, path: str) -> None:
    """Write one word per line; the line number is the word id."""
    with open(path, "w", encoding="utf-8") as fh:
        for word in vocab.words:
            fh.write(word + "\n")


@dataclass
class EncodedCorpus:
    ids: np.ndarray  # int64, shape (n,)
    vocab: Vocabulary

    def __len__(self) -> int:
        return len(self.ids)

    def decode(self) -> list[Token]:
        out = []
        for i in self.ids:
            text = self.vocab.word_of(int(i))
            kind = TokenKind.PUNCT if text in KEPT_PUNCT else TokenKind.WORD
            out.append(Token(text, kind))
        return out


def encode(tokens: Sequence[Token], vocab: Vocabulary) -> EncodedCorpus:
    """Map tokens to ids; texts absent from the vocabulary become the sentinel."""
    ids = np.fromiter(
        (vocab.id_of(tok.text) for tok in tokens), dtype=np.int64, count=len(tokens)
    )
    return EncodedCorpus(ids, vocab)


@dataclass
class Windows:
    """Fixed-length contexts with their next-word targets."""

    contexts: np.ndarray  # int64, shape (n, length)
    targets: np.ndarray  # int64, shape (n,)

    def __len__(self) -> int:
        return len(self.targets)

    def __getitem__(self, i: int) -> tuple[np.ndarray, int]:
        return self.contexts[i], int(self.targets[i])

    @property
    def length(self) -> int:
        return self.contexts.shape[1]


def make_windows(corpus: EncodedCorpus, length: int) -> Windows:
    """Enumerate every (preceding ``length`` ids, next id) pair of the corpus."""
    if length < 1:
        raise ValueError("context length must be >= 1")
    ids = corpus.ids
    if len(ids) <= length:
        raise ValueError("corpus shorter than context")
    contexts = np.lib.stride_tricks.sliding_window_view(ids, length)[:-1].copy()
    targets = ids[length:].copy()
    return Windows(contexts, targets)


def levenshtein(a: str, b: str) -> int:
    """Minimum number of single-character edits transforming ``a`` into ``b``."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def nearest_word(word: str, vocab: Vocabulary) -> str:
    """Closest dictionary word by edit distance.

    An in-vocabulary word maps to itself. Otherwise the sentinel and the
    punctuation entries are excluded and ties go to the higher corpus
    frequency, then to lexicographic order.
    """
    if word in vocab.index:
        return word
    best: tuple[int, int, str] | None = None
    for i, cand in enumerate(vocab.words):
        if i == UNKNOWN_ID or cand in KEPT_PUNCT:
            continue
        key = (levenshtein(word, cand), -vocab.counts[i], cand)
        if best is None or key < best:
            best = key
    if best is None:
        raise ValueError("vocabulary has no candidate words")
    return best[2]

"""Interactive writing logic: substitution, suggestion and seed-line generation."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

import numpy as np

from .corpus import (
    KEPT_PUNCT,
    UNKNOWN_ID,
    Token,
    TokenKind,
    Vocabulary,
    detokenize,
    nearest_word,
    tokenize,
)
from .markov import MarkovModel
from .network import NetworkConfig, NetworkParams, greedy_ids, predict_topk

DEFAULT_SUGGEST_K = 5


class ModelNotLoadedError(ValueError):
    """The engine was built without a next-word network."""


@dataclass
class Suggestion:
    word: str
    probability: float


def load_classics(path: str | None = None) -> list[tuple[str, str]]:
    """Read the opening-line catalog: one "title<TAB>line" per line."""
    if path is None:
        text = resources.files("nextword.data").joinpath("classics.tsv").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    catalog = []
    for row in text.splitlines():
        row = row.strip()
        if not row:
            continue
        title, line = row.split("\t", 1)
        catalog.append((title, line))
    return catalog


class Engine:
    """A loaded model plus the writing-tool behavior on top of it.

    Weights are held in float32, the deployment precision, so a save/load
    round trip reproduces predictions bit for bit. Instances are immutable in
    practice and safe to share across threads.
    """

    def __init__(
        self,
        vocab: Vocabulary,
        net: NetworkParams | None,
        cfg: NetworkConfig | None,
        classics: list[tuple[str, str]] | None = None,
        markov: MarkovModel | None = None,
    ):
        if net is not None and len(vocab) != net.vocab_size:
            raise ValueError("network output size does not match vocabulary")
        self.vocab = vocab
        self.net = net.astype(np.float32) if net is not None else None
        self.cfg = cfg
        self.classics = classics if classics is not None else load_classics()
        self.markov = markov
        self._suggest_exclude = vocab.punct_ids() | {UNKNOWN_ID}

    def _require_net(self) -> NetworkParams:
        if self.net is None or self.cfg is None:
            raise ModelNotLoadedError("model has no next-word network")
        return self.net

    def substitute(self, word: str) -> tuple[str, bool]:
        """Map a word into the vocabulary; flag whether it was replaced."""
        if not word:
            raise ValueError("empty word")
        if word in self.vocab:
            return word, False
        return nearest_word(word, self.vocab), True

    def _substituted_ids(self, text: str) -> tuple[list[int], list[tuple[str, str]]]:
        ids: list[int] = []
        subs: list[tuple[str, str]] = []
        for tok in tokenize(text):
            if tok.is_punct:
                ids.append(self.vocab.id_of(tok.text))
                continue
            word, replaced = self.substitute(tok.text)
            if replaced:
                subs.append((tok.text, word))
            ids.append(self.vocab.id_of(word))
        return ids, subs

    def _context(self, ids: list[int]) -> list[int]:
        length = self.cfg.context_length
        ctx = ids[-length:]
        if len(ctx) < length:
            ctx = [UNKNOWN_ID] * (length - len(ctx)) + ctx
        return ctx

    def suggest_detailed(
        self, text: str, k: int = DEFAULT_SUGGEST_K
    ) -> tuple[list[tuple[str, str]], list[Suggestion]]:
        """Substitution phase then suggestion phase; returns both outcomes."""
        net = self._require_net()
        if k < 1:
            raise ValueError("k must be >= 1")
        ids, subs = self._substituted_ids(text)
        ranked = predict_topk(net, np.asarray(self._context(ids)), k, exclude=self._suggest_exclude)
        suggestions = [Suggestion(self.vocab.word_of(i), p) for i, p in ranked]
        return subs, suggestions

    def suggest(self, text: str, k: int = DEFAULT_SUGGEST_K) -> list[Suggestion]:
        """Top-k next words for the last written words, most probable first."""
        return self.suggest_detailed(text, k)[1]

    def _seed_tokens(self, seed_text: str, substitute: bool) -> list[Token]:
        tokens = tokenize(seed_text)
        if substitute:
            out = []
            for tok in tokens:
                if tok.is_punct:
                    out.append(tok)
                else:
                    out.append(Token(self.substitute(tok.text)[0], TokenKind.WORD))
            return out
        return [tok for tok in tokens if tok.text in self.vocab]

    def generate(
        self,
        seed_text: str,
        n: int,
        substitute: bool = False,
        loop_guard: bool = True,
    ) -> str:
        """Greedy continuation: append the argmax next word ``n`` times.

        With ``substitute`` on, out-of-vocabulary seed words are mapped to
        their nearest dictionary words; otherwise they are skipped.
        """
        net = self._require_net()
        if n < 1:
            raise ValueError("n must be >= 1")
        seed = self._seed_tokens(seed_text, substitute)
        if not seed:
            raise ValueError("seed fully out of vocabulary")
        ids = [self.vocab.id_of(tok.text) for tok in seed]
        new_ids = greedy_ids(
            net,
            ids,
            n,
            self.cfg.context_length,
            exclude={UNKNOWN_ID},
            loop_guard=loop_guard,
        )
        out = list(seed)
        for i in new_ids:
            text = self.vocab.word_of(i)
            kind = TokenKind.PUNCT if text in KEPT_PUNCT else TokenKind.WORD
            out.append(Token(text, kind))
        return detokenize(out)

    def processed_seed(self, seed_text: str, substitute: bool = False) -> str:
        """The seed as generation will actually see it, rendered back to text."""
        return detokenize(self._seed_tokens(seed_text, substitute))

    def list_classics(self) -> list[tuple[str, str]]:
        return list(self.classics)

"""Order-k Markov chain over word ids, the comparison baseline.

Unseen contexts back off to shorter ones, down to the unigram distribution,
so generation never stalls.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np


@dataclass
class MarkovModel:
    order: int
    # context tuple (length 0..order) -> next id -> count
    counts: dict[tuple[int, ...], Counter] = field(default_factory=dict)
    totals: dict[tuple[int, ...], int] = field(default_factory=dict)


def markov_train(ids, order: int = 3) -> MarkovModel:
    """Count (k-gram context -> next word) transitions for k = order down to 0."""
    seq = [int(i) for i in ids]
    if order < 0:
        raise ValueError("order must be >= 0")
    if len(seq) <= order:
        raise ValueError("corpus shorter than order + 1")
    model = MarkovModel(order)
    for k in range(order + 1):
        for t in range(k, len(seq)):
            ctx = tuple(seq[t - k : t])
            nxt = seq[t]
            bucket = model.counts.setdefault(ctx, Counter())
            bucket[nxt] += 1
            model.totals[ctx] = model.totals.get(ctx, 0) + 1
    return model


def markov_next(model: MarkovModel, context) -> dict[int, float]:
    """Next-word distribution for the last ``order`` ids of ``context``.

    Maximum-likelihood count ratios for the longest stored suffix, backing off
    one word at a time; the empty context (unigram) always exists.
    """
    ctx = tuple(int(i) for i in context)
    ctx = ctx[-model.order :] if model.order else ()
    for k in range(len(ctx), -1, -1):
        sub = ctx[len(ctx) - k :]
        bucket = model.counts.get(sub)
        if bucket:
            total = model.totals[sub]
            return {w: c / total for w, c in bucket.items()}
    raise ValueError("model has no counts")


def markov_generate(model: MarkovModel, seed_ids, n: int, rng: np.random.Generator) -> list[int]:
    """Sample ``n`` ids, extending the seed; reproducible given the rng."""
    if n < 1:
        raise ValueError("n must be >= 1")
    ctx = [int(i) for i in seed_ids]
    out: list[int] = []
    for _ in range(n):
        dist = markov_next(model, ctx)
        words = sorted(dist)
        probs = np.array([dist[w] for w in words])
        probs = probs / probs.sum()
        choice = int(rng.choice(len(words), p=probs))
        nxt = words[choice]
        out.append(nxt)
        ctx.append(nxt)
    return out

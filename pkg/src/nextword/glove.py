"""Phase-one training: fit word vectors on corpus co-occurrence counts.

Weighted least squares on log co-occurrences, optimized by per-entry AdaGrad
updates. The returned embedding is the sum of the main and context vectors;
the unknown-sentinel row stays exactly zero and is never touched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import UNKNOWN_ID, EncodedCorpus


@dataclass
class GloveConfig:
    dim: int = 100
    window: int = 10
    x_max: float = 100.0
    alpha: float = 0.75
    epochs: int = 50
    learning_rate: float = 0.05
    seed: int = 0

    def __post_init__(self) -> None:
        if self.dim < 1 or self.window < 1:
            raise ValueError("dim and window must be >= 1")
        if not (0.0 < self.alpha <= 1.0) or self.x_max <= 0:
            raise ValueError("need 0 < alpha <= 1 and x_max > 0")


@dataclass
class CooccurrenceMatrix:
    """Sparse symmetric co-occurrence weights keyed by (id, id)."""

    entries: dict[tuple[int, int], float]
    vocab_size: int

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class GloveParams:
    """Raw factor matrices; kept around for objective diagnostics."""

    w: np.ndarray  # (V, dim) main vectors
    w_ctx: np.ndarray  # (V, dim) context vectors
    b: np.ndarray  # (V,) main biases
    b_ctx: np.ndarray  # (V,) context biases


def build_cooccurrence(corpus: EncodedCorpus, window: int = 10) -> CooccurrenceMatrix:
    """Count co-occurrences within ``window``, weighted 1/distance, both directions.

    Pairs involving the unknown sentinel are skipped.
    """
    ids = np.asarray(corpus.ids, dtype=np.int64)
    size = len(corpus.vocab)
    acc: dict[int, float] = {}
    for d in range(1, window + 1):
        if d >= len(ids):
            break
        left, right = ids[:-d], ids[d:]
        keep = (left != UNKNOWN_ID) & (right != UNKNOWN_ID)
        if not keep.any():
            continue
        keys = left[keep] * size + right[keep]
        uniq, cnt = np.unique(keys, return_counts=True)
        for k, c in zip(uniq.tolist(), cnt.tolist()):
            acc[k] = acc.get(k, 0.0) + c / d
    entries: dict[tuple[int, int], float] = {}
    for k, x in acc.items():
        i, j = divmod(k, size)
        entries[(i, j)] = entries.get((i, j), 0.0) + x
        entries[(j, i)] = entries.get((j, i), 0.0) + x
    return CooccurrenceMatrix(entries, size)


def glove_weight(x, cfg: GloveConfig):
    """Least-squares weight f(x): (x/x_max)^alpha below the cutoff, else 1."""
    arr = np.asarray(x, dtype=np.float64)
    out = np.where(arr < cfg.x_max, (arr / cfg.x_max) ** cfg.alpha, 1.0)
    return float(out) if out.ndim == 0 else out


def _entry_arrays(cooc: CooccurrenceMatrix):
    items = sorted(cooc.entries.items())
    ii = np.array([i for (i, _), _ in items], dtype=np.int64)
    jj = np.array([j for (_, j), _ in items], dtype=np.int64)
    xs = np.array([x for _, x in items], dtype=np.float64)
    return ii, jj, xs


def glove_objective(cooc: CooccurrenceMatrix, params: GloveParams, cfg: GloveConfig) -> float:
    """Sum over entries of f(x) * (w_i . w~_j + b_i + b~_j - ln x)^2."""
    ii, jj, xs = _entry_arrays(cooc)
    pred = (
        np.einsum("nd,nd->n", params.w[ii], params.w_ctx[jj])
        + params.b[ii]
        + params.b_ctx[jj]
    )
    diff = pred - np.log(xs)
    return float(np.sum(glove_weight(xs, cfg) * diff**2))


def glove_fit_params(
    cooc: CooccurrenceMatrix, cfg: GloveConfig
) -> tuple[GloveParams, list[float]]:
    """Fit the factor matrices; returns params and the per-epoch objective.

    The objective list starts with the pre-training value. Deterministic for a
    fixed seed: seeded init and a seeded entry shuffle per epoch, single thread.
    """
    if not cooc.entries:
        raise ValueError("empty co-occurrence matrix")
    rng = np.random.default_rng(cfg.seed)
    size, dim = cooc.vocab_size, cfg.dim
    scale = 0.5 / dim
    params = GloveParams(
        w=rng.uniform(-scale, scale, (size, dim)),
        w_ctx=rng.uniform(-scale, scale, (size, dim)),
        b=rng.uniform(-scale, scale, size),
        b_ctx=rng.uniform(-scale, scale, size),
    )
    # sentinel rows start at zero; no entry touches them, so they stay zero
    params.w[UNKNOWN_ID] = 0.0
    params.w_ctx[UNKNOWN_ID] = 0.0
    params.b[UNKNOWN_ID] = 0.0
    params.b_ctx[UNKNOWN_ID] = 0.0

    ii, jj, xs = _entry_arrays(cooc)
    logx = np.log(xs)
    fx = glove_weight(xs, cfg)
    w, wc, b, bc = params.w, params.w_ctx, params.b, params.b_ctx
    # AdaGrad accumulators, initialized to one
    gw = np.ones_like(w)
    gwc = np.ones_like(wc)
    gb = np.ones_like(b)
    gbc = np.ones_like(bc)
    lr = cfg.learning_rate

    history = [glove_objective(cooc, params, cfg)]
    for _ in range(cfg.epochs):
        for n in rng.permutation(len(xs)):
            i, j = ii[n], jj[n]
            diff = w[i] @ wc[j] + b[i] + bc[j] - logx[n]
            g = fx[n] * diff
            gi = g * wc[j]
            gj = g * w[i]
            w[i] -= lr * gi / np.sqrt(gw[i])
            gw[i] += gi * gi
            wc[j] -= lr * gj / np.sqrt(gwc[j])
            gwc[j] += gj * gj
            b[i] -= lr * g / np.sqrt(gb[i])
            gb[i] += g * g
            bc[j] -= lr * g / np.sqrt(gbc[j])
            gbc[j] += g * g
        value = glove_objective(cooc, params, cfg)
        if not np.isfinite(value):
            raise FloatingPointError("embedding fit diverged (non-finite objective)")
        history.append(value)
    return params, history


def glove_fit(cooc: CooccurrenceMatrix, cfg: GloveConfig) -> np.ndarray:
    """Fit and combine: returns the (V, dim) embedding matrix w + w~."""
    params, _ = glove_fit_params(cooc, cfg)
    emb = params.w + params.w_ctx
    emb[UNKNOWN_ID] = 0.0
    return emb


def export_embedding_text(words: list[str], embedding: np.ndarray, path: str) -> None:
    """Text dump, one "word v1 v2 ... vd" line per word."""
    with open(path, "w", encoding="utf-8") as fh:
        for word, row in zip(words, embedding):
            fh.write(word + " " + " ".join(f"{v:.6g}" for v in row) + "\n")

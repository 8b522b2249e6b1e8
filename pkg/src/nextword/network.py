"""Six-layer word-level next-word predictor on plain numpy.

Pipeline: frozen embedding lookup -> two stacked LSTM layers -> two tanh dense
layers -> softmax projection over the vocabulary. Training is mini-batch Adam
on exact gradients from backpropagation through time; inverted dropout sits
after each LSTM output and each dense layer in train mode.

Gate matrices are stored stacked along the first axis in the fixed order
input | forget | output | candidate.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .corpus import UNKNOWN_ID, Windows


@dataclass
class NetworkConfig:
    context_length: int = 6
    hidden_size: int = 64
    embedding_dim: int = 100
    dropout_rate: float = 0.20
    learning_rate: float = 1e-4
    epochs: int = 100
    batch_size: int = 32
    seed: int = 0

    def __post_init__(self) -> None:
        if self.context_length < 1:
            raise ValueError("context_length must be >= 1")
        if not (0.0 <= self.dropout_rate < 1.0):
            raise ValueError("dropout_rate must be in [0, 1)")


@dataclass
class LstmLayerParams:
    w: np.ndarray  # (4H, in) input weights, gates stacked i|f|o|g
    u: np.ndarray  # (4H, H) recurrent weights
    b: np.ndarray  # (4H,)

    @property
    def hidden_size(self) -> int:
        return self.u.shape[1]


@dataclass
class DenseParams:
    w: np.ndarray  # (out, in)
    b: np.ndarray  # (out,)


@dataclass
class NetworkParams:
    embedding: np.ndarray  # (V, d), frozen during training
    lstm1: LstmLayerParams
    lstm2: LstmLayerParams
    dense1: DenseParams
    dense2: DenseParams
    output: DenseParams  # (V, H) projection to vocabulary logits

    @property
    def vocab_size(self) -> int:
        return self.output.w.shape[0]

    @property
    def hidden_size(self) -> int:
        return self.lstm1.hidden_size

    @property
    def embedding_dim(self) -> int:
        return self.embedding.shape[1]

    def trainable(self) -> dict[str, np.ndarray]:
        """Named trainable arrays in canonical order; the embedding is excluded."""
        return {
            "lstm1.w": self.lstm1.w,
            "lstm1.u": self.lstm1.u,
            "lstm1.b": self.lstm1.b,
            "lstm2.w": self.lstm2.w,
            "lstm2.u": self.lstm2.u,
            "lstm2.b": self.lstm2.b,
            "dense1.w": self.dense1.w,
            "dense1.b": self.dense1.b,
            "dense2.w": self.dense2.w,
            "dense2.b": self.dense2.b,
            "output.w": self.output.w,
            "output.b": self.output.b,
        }

    def with_trainable(self, arrays: Mapping[str, np.ndarray]) -> "NetworkParams":
        a = dict(self.trainable())
        a.update(arrays)
        return NetworkParams(
            embedding=self.embedding,
            lstm1=LstmLayerParams(a["lstm1.w"], a["lstm1.u"], a["lstm1.b"]),
            lstm2=LstmLayerParams(a["lstm2.w"], a["lstm2.u"], a["lstm2.b"]),
            dense1=DenseParams(a["dense1.w"], a["dense1.b"]),
            dense2=DenseParams(a["dense2.w"], a["dense2.b"]),
            output=DenseParams(a["output.w"], a["output.b"]),
        )

    def astype(self, dtype) -> "NetworkParams":
        cast = {k: v.astype(dtype) for k, v in self.trainable().items()}
        out = self.with_trainable(cast)
        out.embedding = self.embedding.astype(dtype)
        return out


def init_params(embedding: np.ndarray, hidden_size: int, rng: np.random.Generator) -> NetworkParams:
    """Seeded uniform +-1/sqrt(fan_in) init; forget-gate biases start at 1."""
    vocab_size, dim = embedding.shape
    h = hidden_size

    def uniform(rows: int, cols: int) -> np.ndarray:
        return rng.uniform(-1.0, 1.0, (rows, cols)) / np.sqrt(cols)

    def lstm(in_dim: int) -> LstmLayerParams:
        b = np.zeros(4 * h)
        b[h : 2 * h] = 1.0  # forget gate
        return LstmLayerParams(w=uniform(4 * h, in_dim), u=uniform(4 * h, h), b=b)

    return NetworkParams(
        embedding=np.array(embedding, dtype=np.float64),
        lstm1=lstm(dim),
        lstm2=lstm(h),
        dense1=DenseParams(uniform(h, h), np.zeros(h)),
        dense2=DenseParams(uniform(h, h), np.zeros(h)),
        output=DenseParams(uniform(vocab_size, h), np.zeros(vocab_size)),
    )


def sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def softmax(logits: np.ndarray) -> np.ndarray:
    """Numerically stable softmax along the last axis."""
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def cross_entropy(probs: np.ndarray, target) -> float:
    """Negative log-likelihood of the target; probabilities floored at 1e-12.

    For a batch of distributions and targets, returns the batch mean.
    """
    p = np.asarray(probs, dtype=np.float64)
    if p.ndim == 1:
        return float(-np.log(max(float(p[int(target)]), 1e-12)))
    chosen = p[np.arange(p.shape[0]), np.asarray(target, dtype=np.int64)]
    return float(np.mean(-np.log(np.maximum(chosen, 1e-12))))


def dropout(x: np.ndarray, rate: float, mode: str = "train", rng: np.random.Generator | None = None):
    """Inverted dropout: zero units with probability ``rate``, scale survivors.

    Returns (output, mask). Eval mode (and rate 0) is the identity with a unit
    mask, so inference needs no correction.
    """
    if not (0.0 <= rate < 1.0):
        raise ValueError("rate must be in [0, 1)")
    if mode == "eval" or rate == 0.0:
        return x, np.ones_like(x)
    if rng is None:
        raise ValueError("train-mode dropout needs an rng")
    mask = (rng.random(x.shape) >= rate).astype(x.dtype) / (1.0 - rate)
    return x * mask, mask


def _gate_split(a: np.ndarray, h: int):
    i = sigmoid(a[..., :h])
    f = sigmoid(a[..., h : 2 * h])
    o = sigmoid(a[..., 2 * h : 3 * h])
    g = np.tanh(a[..., 3 * h :])
    return i, f, o, g


def lstm_step(layer: LstmLayerParams, x: np.ndarray, h_prev: np.ndarray, c_prev: np.ndarray):
    """One gated recurrence step; returns (h, c)."""
    a = x @ layer.w.T + h_prev @ layer.u.T + layer.b
    i, f, o, g = _gate_split(a, layer.hidden_size)
    c = f * c_prev + i * g
    h = o * np.tanh(c)
    return h, c


@dataclass
class _LstmTrace:
    x: list = field(default_factory=list)
    i: list = field(default_factory=list)
    f: list = field(default_factory=list)
    o: list = field(default_factory=list)
    g: list = field(default_factory=list)
    c: list = field(default_factory=list)
    h: list = field(default_factory=list)


@dataclass
class ForwardCache:
    """Every activation, gate value, cell state and dropout mask of one pass."""

    ids: np.ndarray
    trace1: _LstmTrace
    trace2: _LstmTrace
    drop1: list | None  # per-step masks on lstm1 outputs
    drop2: np.ndarray | None  # mask on the final lstm2 output
    feat: np.ndarray  # input to dense1
    z1: np.ndarray
    drop3: np.ndarray | None
    v1: np.ndarray  # input to dense2
    z2: np.ndarray
    drop4: np.ndarray | None
    v2: np.ndarray  # input to the output projection
    probs: np.ndarray  # (B, V) float64

    def masks(self) -> dict:
        return {"h1": self.drop1, "h2": self.drop2, "z1": self.drop3, "z2": self.drop4}


def forward(
    params: NetworkParams,
    context,
    *,
    mode: str = "eval",
    dropout_rate: float = 0.0,
    rng: np.random.Generator | None = None,
    masks: dict | None = None,
):
    """Run the six-layer pipeline over a context of word ids.

    ``context`` is (L,) or (B, L); probabilities come back matching. Dropout
    masks are sampled in train mode, or replayed when ``masks`` (from a prior
    cache) is given, which keeps the pass a deterministic function of params.
    """
    ids = np.asarray(context, dtype=np.int64)
    single = ids.ndim == 1
    if single:
        ids = ids[None, :]
    if ids.ndim != 2 or ids.shape[1] < 1:
        raise ValueError("context must be a non-empty 1-D or 2-D id array")
    if ids.min() < 0 or ids.max() >= params.vocab_size:
        raise ValueError("word id out of range")
    if mode not in ("train", "eval"):
        raise ValueError(f"unknown mode {mode!r}")
    dropping = mode == "train" and dropout_rate > 0.0
    if dropping and masks is None and rng is None:
        raise ValueError("train-mode dropout needs an rng")

    batch, steps = ids.shape
    h = params.hidden_size
    dt = params.lstm1.w.dtype

    def drop(x, given):
        if not dropping:
            return x, None
        if given is not None:
            return x * given, given
        m = (rng.random(x.shape) >= dropout_rate).astype(dt) / (1.0 - dropout_rate)
        return x * m, m

    emb = params.embedding[ids]  # (B, L, d)
    t1, t2 = _LstmTrace(), _LstmTrace()
    drop1: list | None = [] if dropping else None
    h1 = np.zeros((batch, h), dtype=dt)
    c1 = np.zeros((batch, h), dtype=dt)
    h2 = np.zeros((batch, h), dtype=dt)
    c2 = np.zeros((batch, h), dtype=dt)
    for t in range(steps):
        x1 = emb[:, t, :]
        a1 = x1 @ params.lstm1.w.T + h1 @ params.lstm1.u.T + params.lstm1.b
        i1, f1, o1, g1 = _gate_split(a1, h)
        c1 = f1 * c1 + i1 * g1
        h1 = o1 * np.tanh(c1)
        t1.x.append(x1)
        t1.i.append(i1)
        t1.f.append(f1)
        t1.o.append(o1)
        t1.g.append(g1)
        t1.c.append(c1)
        t1.h.append(h1)

        given = masks["h1"][t] if masks is not None and masks["h1"] is not None else None
        x2, m1 = drop(h1, given)
        if drop1 is not None:
            drop1.append(m1)
        a2 = x2 @ params.lstm2.w.T + h2 @ params.lstm2.u.T + params.lstm2.b
        i2, f2, o2, g2 = _gate_split(a2, h)
        c2 = f2 * c2 + i2 * g2
        h2 = o2 * np.tanh(c2)
        t2.x.append(x2)
        t2.i.append(i2)
        t2.f.append(f2)
        t2.o.append(o2)
        t2.g.append(g2)
        t2.c.append(c2)
        t2.h.append(h2)

    feat, m2 = drop(h2, masks["h2"] if masks is not None else None)
    z1 = np.tanh(feat @ params.dense1.w.T + params.dense1.b)
    v1, m3 = drop(z1, masks["z1"] if masks is not None else None)
    z2 = np.tanh(v1 @ params.dense2.w.T + params.dense2.b)
    v2, m4 = drop(z2, masks["z2"] if masks is not None else None)
    logits = v2 @ params.output.w.T + params.output.b
    probs = softmax(logits.astype(np.float64))

    cache = ForwardCache(
        ids=ids,
        trace1=t1,
        trace2=t2,
        drop1=drop1,
        drop2=m2,
        feat=feat,
        z1=z1,
        drop3=m3,
        v1=v1,
        z2=z2,
        drop4=m4,
        v2=v2,
        probs=probs,
    )
    return (probs[0] if single else probs), cache


def _lstm_backward(layer: LstmLayerParams, trace: _LstmTrace, d_out: list):
    """BPTT through one LSTM layer given per-step gradients on its outputs.

    Returns gradients for (w, u, b) and the per-step gradients on the inputs.
    """
    steps = len(trace.h)
    h = layer.hidden_size
    zeros = np.zeros_like(trace.h[0])
    g_w = np.zeros_like(layer.w)
    g_u = np.zeros_like(layer.u)
    g_b = np.zeros_like(layer.b)
    dx: list = [None] * steps
    dh_rec = zeros
    dc = zeros
    for t in reversed(range(steps)):
        dh = d_out[t] + dh_rec
        i, f, o, g = trace.i[t], trace.f[t], trace.o[t], trace.g[t]
        c = trace.c[t]
        c_prev = trace.c[t - 1] if t > 0 else zeros
        h_prev = trace.h[t - 1] if t > 0 else zeros
        tc = np.tanh(c)
        do = dh * tc
        dct = dc + dh * o * (1.0 - tc * tc)
        di = dct * g
        dg = dct * i
        df = dct * c_prev
        da = np.concatenate(
            [
                di * i * (1.0 - i),
                df * f * (1.0 - f),
                do * o * (1.0 - o),
                dg * (1.0 - g * g),
            ],
            axis=1,
        )
        g_w += da.T @ trace.x[t]
        g_u += da.T @ h_prev
        g_b += da.sum(axis=0)
        dx[t] = da @ layer.w
        dh_rec = da @ layer.u
        dc = dct * f
    return g_w, g_u, g_b, dx


def backward(params: NetworkParams, cache: ForwardCache, target) -> dict[str, np.ndarray]:
    """Exact gradients of the (batch-mean) cross-entropy w.r.t. all trainable
    parameters; the frozen embedding gets none."""
    targets = np.atleast_1d(np.asarray(target, dtype=np.int64))
    batch = cache.probs.shape[0]
    if targets.shape[0] != batch:
        raise ValueError("targets do not match the cached forward pass")

    dlogits = cache.probs.copy()
    dlogits[np.arange(batch), targets] -= 1.0
    dlogits /= batch
    dlogits = dlogits.astype(cache.v2.dtype)

    grads: dict[str, np.ndarray] = {}
    grads["output.w"] = dlogits.T @ cache.v2
    grads["output.b"] = dlogits.sum(axis=0)
    dv2 = dlogits @ params.output.w
    dz2 = dv2 if cache.drop4 is None else dv2 * cache.drop4
    da2 = dz2 * (1.0 - cache.z2 * cache.z2)
    grads["dense2.w"] = da2.T @ cache.v1
    grads["dense2.b"] = da2.sum(axis=0)
    dv1 = da2 @ params.dense2.w
    dz1 = dv1 if cache.drop3 is None else dv1 * cache.drop3
    da1 = dz1 * (1.0 - cache.z1 * cache.z1)
    grads["dense1.w"] = da1.T @ cache.feat
    grads["dense1.b"] = da1.sum(axis=0)
    dfeat = da1 @ params.dense1.w
    dh2_last = dfeat if cache.drop2 is None else dfeat * cache.drop2

    steps = len(cache.trace2.h)
    d_out2 = [np.zeros_like(dh2_last) for _ in range(steps)]
    d_out2[-1] = dh2_last
    g_w2, g_u2, g_b2, dx2 = _lstm_backward(params.lstm2, cache.trace2, d_out2)
    grads["lstm2.w"], grads["lstm2.u"], grads["lstm2.b"] = g_w2, g_u2, g_b2

    if cache.drop1 is None:
        d_out1 = dx2
    else:
        d_out1 = [dx2[t] * cache.drop1[t] for t in range(steps)]
    g_w1, g_u1, g_b1, _ = _lstm_backward(params.lstm1, cache.trace1, d_out1)
    grads["lstm1.w"], grads["lstm1.u"], grads["lstm1.b"] = g_w1, g_u1, g_b1

    ordered = params.trainable()
    return {k: grads[k] for k in ordered}


@dataclass
class AdamState:
    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]
    t: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    @classmethod
    def for_params(cls, params: NetworkParams) -> "AdamState":
        return cls(
            m={k: np.zeros_like(a) for k, a in params.trainable().items()},
            v={k: np.zeros_like(a) for k, a in params.trainable().items()},
        )


def adam_update(
    params: NetworkParams,
    grads: Mapping[str, np.ndarray],
    state: AdamState,
    lr: float,
) -> tuple[NetworkParams, AdamState]:
    """One bias-corrected Adam step. Pure: inputs are left untouched."""
    t = state.t + 1
    new_m: dict[str, np.ndarray] = {}
    new_v: dict[str, np.ndarray] = {}
    updated: dict[str, np.ndarray] = {}
    for key, arr in params.trainable().items():
        g = grads[key]
        if not np.isfinite(g).all():
            raise FloatingPointError(f"non-finite gradient in {key}")
        m = state.beta1 * state.m[key] + (1.0 - state.beta1) * g
        v = state.beta2 * state.v[key] + (1.0 - state.beta2) * g * g
        m_hat = m / (1.0 - state.beta1**t)
        v_hat = v / (1.0 - state.beta2**t)
        new_m[key] = m
        new_v[key] = v
        updated[key] = arr - lr * m_hat / (np.sqrt(v_hat) + state.epsilon)
    next_state = AdamState(new_m, new_v, t, state.beta1, state.beta2, state.epsilon)
    return params.with_trainable(updated), next_state


def evaluate(params: NetworkParams, windows: Windows, batch_size: int = 1024):
    """Deterministic eval-mode pass: (mean cross-entropy, top-1 accuracy)."""
    n = len(windows)
    total_loss = 0.0
    correct = 0
    for start in range(0, n, batch_size):
        ctx = windows.contexts[start : start + batch_size]
        tgt = windows.targets[start : start + batch_size]
        probs, _ = forward(params, ctx)
        chosen = probs[np.arange(len(tgt)), tgt]
        total_loss += float(-np.log(np.maximum(chosen, 1e-12)).sum())
        correct += int((probs.argmax(axis=1) == tgt).sum())
    return total_loss / n, correct / n


@dataclass
class TrainHistory:
    loss: list[float] = field(default_factory=list)
    accuracy: list[float] = field(default_factory=list)


def train(
    windows: Windows,
    embedding: np.ndarray,
    cfg: NetworkConfig,
    *,
    early_stop: Callable[[TrainHistory], bool] | None = None,
    log: Callable[[int, float, float], None] | None = None,
) -> tuple[NetworkParams, TrainHistory]:
    """Mini-batch Adam over seeded shuffles of the windows.

    History records mean cross-entropy and top-1 accuracy from a deterministic
    end-of-epoch pass over all windows. Everything (init, shuffles, dropout)
    draws from one generator seeded by ``cfg.seed``, so equal seeds give
    identical histories. ``early_stop`` may end training once the history
    satisfies a caller-chosen condition.
    """
    if len(windows) == 0:
        raise ValueError("no training windows")
    if windows.length != cfg.context_length:
        raise ValueError("window length does not match config context_length")
    if embedding.shape[1] != cfg.embedding_dim:
        raise ValueError("embedding dim does not match config")

    rng = np.random.default_rng(cfg.seed)
    params = init_params(embedding, cfg.hidden_size, rng)
    state = AdamState.for_params(params)
    history = TrainHistory()
    n = len(windows)

    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            probs, cache = forward(
                params,
                windows.contexts[idx],
                mode="train",
                dropout_rate=cfg.dropout_rate,
                rng=rng,
            )
            batch_loss = cross_entropy(probs, windows.targets[idx])
            if not np.isfinite(batch_loss):
                raise RuntimeError(
                    f"training diverged at epoch {epoch}, batch {start // cfg.batch_size}"
                )
            grads = backward(params, cache, windows.targets[idx])
            params, state = adam_update(params, grads, state, cfg.learning_rate)
        ep_loss, ep_acc = evaluate(params, windows)
        history.loss.append(ep_loss)
        history.accuracy.append(ep_acc)
        if log is not None:
            log(epoch, ep_loss, ep_acc)
        if early_stop is not None and early_stop(history):
            break
    return params, history


def predict_topk(
    params: NetworkParams,
    context,
    k: int,
    exclude: Iterable[int] = (),
) -> list[tuple[int, float]]:
    """Top-k next-word candidates, probability-descending, ties to the lower id.

    Ids in ``exclude`` are suppressed as long as k candidates of other kinds
    exist; otherwise the shortfall is filled back from the excluded ones.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    probs, _ = forward(params, context)
    size = probs.shape[-1]
    order = np.lexsort((np.arange(size), -probs))
    banned = set(exclude)
    kept = [i for i in order if i not in banned]
    if len(kept) < k:
        kept.extend(i for i in order if i in banned)
    return [(int(i), float(probs[i])) for i in kept[:k]]


def greedy_ids(
    params: NetworkParams,
    seed_ids: Sequence[int],
    n: int,
    context_length: int,
    *,
    exclude: Iterable[int] = (),
    loop_guard: bool = False,
) -> list[int]:
    """Append ``n`` argmax predictions, sliding a window of the last ids.

    Short seeds are left-padded with the unknown sentinel. With ``loop_guard``
    on, a (context, argmax) pair seen more than 3 times falls back to the
    second-ranked word once, which breaks greedy cycles.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    ctx = list(seed_ids)[-context_length:]
    if len(ctx) < context_length:
        ctx = [UNKNOWN_ID] * (context_length - len(ctx)) + ctx
    seen: Counter = Counter()
    out: list[int] = []
    for _ in range(n):
        cands = predict_topk(params, np.asarray(ctx), 2, exclude=exclude)
        chosen = cands[0][0]
        if loop_guard:
            pair = (tuple(ctx), chosen)
            seen[pair] += 1
            if seen[pair] > 3 and len(cands) > 1:
                chosen = cands[1][0]
                seen[pair] = 0
        out.append(chosen)
        ctx = ctx[1:] + [chosen]
    return out

"""Single-file model container: magic, version, JSON metadata, raw array blocks.

Layout (all integers little-endian):

    "DTNG" | u32 version | u32 metadata_len | metadata JSON (utf-8)
    u32 block_count | blocks...

Each block: u16 name_len | name utf-8 | u8 dtype (0=float32, 1=int64) |
u8 ndim | u32 dims... | raw little-endian data. Network weights are float32;
the optional Markov section stores per-order transition counts as int64.
"""

from __future__ import annotations

import json
import struct
from collections import Counter
from typing import BinaryIO

import numpy as np

from .corpus import Vocabulary
from .engine import Engine
from .markov import MarkovModel
from .network import DenseParams, LstmLayerParams, NetworkConfig, NetworkParams

MAGIC = b"DTNG"
FORMAT_VERSION = 1

_DTYPES = {0: np.dtype("<f4"), 1: np.dtype("<i8")}
_DTYPE_CODES = {np.dtype("<f4"): 0, np.dtype("<i8"): 1}


class ModelFileError(Exception):
    pass


def _write_block(fh: BinaryIO, name: str, arr: np.ndarray) -> None:
    data = np.ascontiguousarray(arr)
    if data.dtype == np.float32 or data.dtype.kind == "f":
        data = data.astype("<f4")
    else:
        data = data.astype("<i8")
    raw = name.encode("utf-8")
    fh.write(struct.pack("<H", len(raw)))
    fh.write(raw)
    fh.write(struct.pack("<BB", _DTYPE_CODES[data.dtype], data.ndim))
    for dim in data.shape:
        fh.write(struct.pack("<I", dim))
    fh.write(data.tobytes())


def _read_exact(fh: BinaryIO, n: int) -> bytes:
    buf = fh.read(n)
    if len(buf) != n:
        raise ModelFileError("truncated model file")
    return buf


def _read_block(fh: BinaryIO) -> tuple[str, np.ndarray]:
    (name_len,) = struct.unpack("<H", _read_exact(fh, 2))
    name = _read_exact(fh, name_len).decode("utf-8")
    code, ndim = struct.unpack("<BB", _read_exact(fh, 2))
    if code not in _DTYPES:
        raise ModelFileError(f"unknown dtype code {code} in block {name!r}")
    shape = tuple(struct.unpack("<I", _read_exact(fh, 4))[0] for _ in range(ndim))
    dtype = _DTYPES[code]
    count = int(np.prod(shape, dtype=np.int64)) if shape else 1
    raw = _read_exact(fh, count * dtype.itemsize)
    arr = np.frombuffer(raw, dtype=dtype).reshape(shape)
    return name, arr.copy()


def _config_to_json(cfg: NetworkConfig) -> dict:
    return {
        "contextLength": cfg.context_length,
        "hiddenSize": cfg.hidden_size,
        "embeddingDim": cfg.embedding_dim,
        "dropoutRate": cfg.dropout_rate,
        "learningRate": cfg.learning_rate,
        "epochs": cfg.epochs,
        "batchSize": cfg.batch_size,
        "seed": cfg.seed,
    }


def _config_from_json(obj: dict) -> NetworkConfig:
    return NetworkConfig(
        context_length=obj["contextLength"],
        hidden_size=obj["hiddenSize"],
        embedding_dim=obj["embeddingDim"],
        dropout_rate=obj["dropoutRate"],
        learning_rate=obj["learningRate"],
        epochs=obj["epochs"],
        batch_size=obj["batchSize"],
        seed=obj["seed"],
    )


def _markov_blocks(model: MarkovModel):
    by_order: dict[int, list[tuple[tuple[int, ...], int, int]]] = {}
    for ctx, bucket in model.counts.items():
        for nxt, cnt in bucket.items():
            by_order.setdefault(len(ctx), []).append((ctx, nxt, cnt))
    for order in sorted(by_order):
        rows = sorted(by_order[order])
        contexts = np.array([r[0] for r in rows], dtype=np.int64).reshape(len(rows), order)
        nexts = np.array([r[1] for r in rows], dtype=np.int64)
        counts = np.array([r[2] for r in rows], dtype=np.int64)
        yield order, contexts, nexts, counts


def save_model(path: str, engine: Engine) -> None:
    """Serialize an engine; weights as float32, Markov counts as int64."""
    meta = {
        "config": _config_to_json(engine.cfg) if engine.cfg is not None else None,
        "vocab": {"words": engine.vocab.words, "counts": engine.vocab.counts},
        "classics": [[t, l] for t, l in engine.classics],
        "seed": engine.cfg.seed if engine.cfg is not None else 0,
        "sections": {"network": engine.net is not None, "markov": engine.markov is not None},
    }
    blocks: list[tuple[str, np.ndarray]] = []
    if engine.net is not None:
        net = engine.net
        blocks.append(("embedding", net.embedding))
        for name, arr in net.trainable().items():
            blocks.append((name, arr))
    if engine.markov is not None:
        meta["markovOrder"] = engine.markov.order
        for order, contexts, nexts, counts in _markov_blocks(engine.markov):
            blocks.append((f"markov.{order}.contexts", contexts))
            blocks.append((f"markov.{order}.next", nexts))
            blocks.append((f"markov.{order}.counts", counts))

    payload = json.dumps(meta, ensure_ascii=False).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", FORMAT_VERSION))
        fh.write(struct.pack("<I", len(payload)))
        fh.write(payload)
        fh.write(struct.pack("<I", len(blocks)))
        for name, arr in blocks:
            _write_block(fh, name, arr)


def _net_from_blocks(blocks: dict[str, np.ndarray]) -> NetworkParams:
    try:
        return NetworkParams(
            embedding=blocks["embedding"],
            lstm1=LstmLayerParams(blocks["lstm1.w"], blocks["lstm1.u"], blocks["lstm1.b"]),
            lstm2=LstmLayerParams(blocks["lstm2.w"], blocks["lstm2.u"], blocks["lstm2.b"]),
            dense1=DenseParams(blocks["dense1.w"], blocks["dense1.b"]),
            dense2=DenseParams(blocks["dense2.w"], blocks["dense2.b"]),
            output=DenseParams(blocks["output.w"], blocks["output.b"]),
        )
    except KeyError as missing:
        raise ModelFileError(f"missing weight block {missing}") from None


def _markov_from_blocks(order: int, blocks: dict[str, np.ndarray]) -> MarkovModel:
    model = MarkovModel(order)
    for k in range(order + 1):
        key = f"markov.{k}.contexts"
        if key not in blocks:
            continue
        contexts = blocks[key]
        nexts = blocks[f"markov.{k}.next"]
        counts = blocks[f"markov.{k}.counts"]
        for row, nxt, cnt in zip(contexts, nexts, counts):
            ctx = tuple(int(x) for x in row)
            bucket = model.counts.setdefault(ctx, Counter())
            bucket[int(nxt)] = int(cnt)
            model.totals[ctx] = model.totals.get(ctx, 0) + int(cnt)
    return model


def load_model(path: str) -> Engine:
    """Read a model file back into an engine; raises ModelFileError on damage."""
    with open(path, "rb") as fh:
        if _read_exact(fh, 4) != MAGIC:
            raise ModelFileError("not a model file (bad magic)")
        (version,) = struct.unpack("<I", _read_exact(fh, 4))
        if version != FORMAT_VERSION:
            raise ModelFileError(f"unsupported version {version}")
        (meta_len,) = struct.unpack("<I", _read_exact(fh, 4))
        try:
            meta = json.loads(_read_exact(fh, meta_len).decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ModelFileError(f"corrupt metadata: {exc}") from None
        (n_blocks,) = struct.unpack("<I", _read_exact(fh, 4))
        blocks = dict(_read_block(fh) for _ in range(n_blocks))

    vocab_obj = meta["vocab"]
    words = list(vocab_obj["words"])
    vocab = Vocabulary(
        words=words,
        index={w: i for i, w in enumerate(words)},
        counts=list(vocab_obj["counts"]),
    )
    sections = meta.get("sections", {})
    cfg = _config_from_json(meta["config"]) if meta.get("config") else None
    net = _net_from_blocks(blocks) if sections.get("network") else None
    markov = (
        _markov_from_blocks(int(meta["markovOrder"]), blocks)
        if sections.get("markov")
        else None
    )
    classics = [(t, l) for t, l in meta.get("classics", [])]
    return Engine(vocab, net, cfg, classics=classics or None, markov=markov)

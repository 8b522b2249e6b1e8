"""Command-line entry points: training, querying, evaluation and serving."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .corpus import (
    UNKNOWN_ID,
    build_vocabulary,
    encode,
    export_vocabulary,
    make_windows,
    tokenize,
)
from .engine import Engine
from .evaluation import (
    format_robustness_table,
    format_similarity_table,
    ngram_similarity,
    robustness_curve,
    write_robustness_csv,
    write_similarity_csv,
)
from .glove import GloveConfig, build_cooccurrence, glove_fit
from .markov import markov_generate, markov_train
from .modelfile import ModelFileError, load_model, save_model
from .network import NetworkConfig, greedy_ids, train


def _read_corpus(paths: list[str]) -> str:
    """Concatenate the files in command-line order with newline separators."""
    chunks = []
    for path in paths:
        with open(path, encoding="utf-8") as fh:
            chunks.append(fh.read())
    return "\n".join(chunks)


def _parse_sizes(spec: str) -> list[int]:
    """Accept '1..8', a single size, or a comma list."""
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(s) for s in spec.split(",") if s]


def _parse_fractions(spec: str) -> list[float]:
    return [float(s) for s in spec.split(",") if s]


def _cmd_train(args) -> int:
    text = _read_corpus(args.corpus)
    tokens = tokenize(text)
    vocab = build_vocabulary(tokens)
    corpus = encode(tokens, vocab)
    print(f"corpus: {len(tokens)} tokens, vocabulary {len(vocab)}")
    if args.export_vocab:
        export_vocabulary(vocab, args.export_vocab)
        print(f"vocabulary written to {args.export_vocab}")

    glove_cfg = GloveConfig(dim=args.embed_dim, seed=args.seed)
    print("fitting embeddings...")
    embedding = glove_fit(build_cooccurrence(corpus, glove_cfg.window), glove_cfg)

    cfg = NetworkConfig(
        context_length=args.context,
        hidden_size=args.hidden,
        embedding_dim=args.embed_dim,
        dropout_rate=args.dropout,
        learning_rate=args.lr,
        epochs=args.epochs,
        seed=args.seed,
    )
    windows = make_windows(corpus, cfg.context_length)
    print(f"training on {len(windows)} windows...")

    def log(epoch, loss, acc):
        print(f"epoch {epoch}/{cfg.epochs}  loss {loss:.4f}  accuracy {acc:.4f}")

    params, _ = train(windows, embedding, cfg, log=log)
    engine = Engine(vocab, params, cfg)
    save_model(args.out, engine)
    print(f"model saved to {args.out}")
    return 0


def _cmd_suggest(args) -> int:
    engine = load_model(args.model)
    subs, suggestions = engine.suggest_detailed(args.text, args.k)
    for frm, to in subs:
        print(f"substituted: {frm} -> {to}")
    for s in suggestions:
        print(f"{s.word}\t{s.probability:.6f}")
    return 0


def _cmd_generate(args) -> int:
    engine = load_model(args.model)
    print(engine.generate(args.seed_text, args.words, substitute=args.substitute))
    return 0


def _cmd_markov_train(args) -> int:
    text = _read_corpus(args.corpus)
    tokens = tokenize(text)
    vocab = build_vocabulary(tokens)
    corpus = encode(tokens, vocab)
    model = markov_train(corpus.ids, args.order)
    engine = Engine(vocab, None, None, markov=model)
    save_model(args.out, engine)
    print(f"markov model (order {args.order}) saved to {args.out}")
    return 0


def _cmd_eval_ngram(args) -> int:
    engine = load_model(args.model)
    text = _read_corpus(args.corpus)
    reference = encode(tokenize(text), engine.vocab).ids
    if engine.net is not None:
        seed = reference[: engine.cfg.context_length].tolist()
        sample = greedy_ids(
            engine.net,
            seed,
            args.sample_words,
            engine.cfg.context_length,
            exclude={UNKNOWN_ID},
            loop_guard=False,
        )
    elif engine.markov is not None:
        sample = markov_generate(
            engine.markov, [], args.sample_words, np.random.default_rng(0)
        )
    else:
        raise ValueError("model has neither network nor markov sections")
    reports = [ngram_similarity(sample, reference, n) for n in _parse_sizes(args.n)]
    print(format_similarity_table(reports))
    if args.csv:
        write_similarity_csv(reports, args.csv)
        print(f"csv written to {args.csv}")
    return 0


def _cmd_eval_robustness(args) -> int:
    engine = load_model(args.model)
    net = engine.net
    if net is None:
        raise ValueError("robustness evaluation needs a network model")
    text = _read_corpus(args.corpus)
    corpus = encode(tokenize(text), engine.vocab)
    windows = make_windows(corpus, engine.cfg.context_length)
    report = robustness_curve(
        net, windows, _parse_fractions(args.fractions), np.random.default_rng(0)
    )
    print(format_robustness_table(report))
    if args.csv:
        write_robustness_csv(report, args.csv)
        print(f"csv written to {args.csv}")
    return 0


def _cmd_serve(args) -> int:
    from .server import serve

    engine = load_model(args.model)
    serve(engine, args.addr, args.static)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nextword", description="Corpus-conditioned predictive writing tools"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train embeddings and the next-word network")
    p.add_argument("--corpus", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--hidden", type=int, default=64)
    p.add_argument("--context", type=int, default=6)
    p.add_argument("--dropout", type=float, default=0.2)
    p.add_argument("--lr", type=float, default=1e-4)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--embed-dim", type=int, default=100)
    p.add_argument("--export-vocab", default=None, help="also write the vocabulary, one word per line")
    p.set_defaults(fn=_cmd_train)

    p = sub.add_parser("suggest", help="suggest next words for a text")
    p.add_argument("--model", required=True)
    p.add_argument("--text", required=True)
    p.add_argument("--k", type=int, default=5)
    p.set_defaults(fn=_cmd_suggest)

    p = sub.add_parser("generate", help="greedy story generation from a seed line")
    p.add_argument("--model", required=True)
    p.add_argument("--seed-text", required=True)
    p.add_argument("--words", type=int, required=True)
    p.add_argument("--substitute", action="store_true")
    p.set_defaults(fn=_cmd_generate)

    p = sub.add_parser("markov-train", help="train the Markov baseline")
    p.add_argument("--corpus", nargs="+", required=True)
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_markov_train)

    ev = sub.add_parser("eval", help="run the evaluation experiments")
    evsub = ev.add_subparsers(dest="experiment", required=True)

    p = evsub.add_parser("ngram", help="n-gram overlap of generated text with the corpus")
    p.add_argument("--model", required=True)
    p.add_argument("--corpus", nargs="+", required=True)
    p.add_argument("--n", default="1..8", help="n-gram sizes, e.g. 1..8 or 2,3")
    p.add_argument("--sample-words", type=int, default=5000)
    p.add_argument("--csv", default=None)
    p.set_defaults(fn=_cmd_eval_ngram)

    p = evsub.add_parser("robustness", help="accuracy under missing input words")
    p.add_argument("--model", required=True)
    p.add_argument("--corpus", nargs="+", required=True)
    p.add_argument("--fractions", default="0,0.1,0.2,0.4,0.6,0.8")
    p.add_argument("--csv", default=None)
    p.set_defaults(fn=_cmd_eval_robustness)

    p = sub.add_parser("serve", help="serve the JSON API (and optionally the UI)")
    p.add_argument("--model", required=True)
    p.add_argument("--addr", default="127.0.0.1:8000")
    p.add_argument("--static", default=None, help="directory with the built UI")
    p.set_defaults(fn=_cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, RuntimeError, ModelFileError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Quantitative experiments: n-gram overlap with the corpus, robustness to
missing input words, and configuration sweeps."""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np

from .corpus import UNKNOWN_ID, EncodedCorpus, Windows, make_windows
from .glove import GloveConfig, build_cooccurrence, glove_fit
from .network import NetworkConfig, NetworkParams, evaluate, greedy_ids, train


@dataclass
class SimilarityReport:
    n: int
    matched: int
    total: int

    @property
    def ratio(self) -> float:
        return self.matched / self.total if self.total else 0.0


@dataclass
class RobustnessReport:
    missing_fractions: list[float]
    accuracy: list[float]


@dataclass
class SweepRow:
    config: NetworkConfig
    accuracy: float | None
    similarity: list[SimilarityReport]
    error: str | None = None


def ngram_similarity(generated, reference, n: int) -> SimilarityReport:
    """Count generated n-grams (with multiplicity) that occur in the reference."""
    if n < 1:
        raise ValueError("n must be >= 1")
    gen = [int(i) for i in generated]
    ref = [int(i) for i in reference]
    if len(gen) < n or len(ref) < n:
        raise ValueError("texts shorter than n")
    ref_grams = set(zip(*(ref[i:] for i in range(n))))
    gen_grams = list(zip(*(gen[i:] for i in range(n))))
    matched = sum(g in ref_grams for g in gen_grams)
    return SimilarityReport(n=n, matched=matched, total=len(gen_grams))


def masked_accuracy(params: NetworkParams, windows: Windows, fraction: float, rng: np.random.Generator) -> float:
    """Top-1 accuracy after replacing an exact share of context ids with the sentinel."""
    contexts = windows.contexts.copy()
    total = contexts.size
    k = int(round(fraction * total))
    if k > 0:
        flat = contexts.reshape(-1)
        flat[rng.choice(total, size=k, replace=False)] = UNKNOWN_ID
    _, acc = evaluate(params, Windows(contexts, windows.targets))
    return acc


def robustness_curve(
    params: NetworkParams,
    windows: Windows,
    fractions,
    rng: np.random.Generator,
) -> RobustnessReport:
    """Accuracy as a function of the share of context words hidden from the net."""
    fractions = [float(f) for f in fractions]
    if any(not (0.0 <= f <= 1.0) for f in fractions):
        raise ValueError("fractions must lie in [0, 1]")
    acc = [masked_accuracy(params, windows, f, rng) for f in fractions]
    return RobustnessReport(fractions, acc)


def sweep(
    configs,
    corpus: EncodedCorpus,
    *,
    glove_cfg: GloveConfig | None = None,
    sample_words: int = 5000,
    ngram_sizes=range(1, 9),
    seed: int = 0,
) -> list[SweepRow]:
    """Train one model per config, generate a sample, score n-gram overlap.

    Embeddings are fitted once per distinct dimension and reused. Failures are
    annotated on their row instead of aborting the sweep.
    """
    embeddings: dict[int, np.ndarray] = {}
    rows: list[SweepRow] = []
    base_glove = glove_cfg or GloveConfig(seed=seed)
    for cfg in configs:
        try:
            if cfg.embedding_dim not in embeddings:
                g = replace(base_glove, dim=cfg.embedding_dim)
                embeddings[cfg.embedding_dim] = glove_fit(
                    build_cooccurrence(corpus, g.window), g
                )
            emb = embeddings[cfg.embedding_dim]
            windows = make_windows(corpus, cfg.context_length)
            params, history = train(windows, emb, cfg)
            seed_ids = corpus.ids[: cfg.context_length].tolist()
            sample = greedy_ids(
                params,
                seed_ids,
                sample_words,
                cfg.context_length,
                exclude={UNKNOWN_ID},
                loop_guard=False,
            )
            sims = [ngram_similarity(sample, corpus.ids, n) for n in ngram_sizes]
            rows.append(SweepRow(cfg, history.accuracy[-1], sims))
        except Exception as exc:  # annotate, keep sweeping
            rows.append(SweepRow(cfg, None, [], error=str(exc)))
    return rows


def write_similarity_csv(reports: list[SimilarityReport], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh)
        out.writerow(["n", "matched", "total", "ratio"])
        for r in reports:
            out.writerow([r.n, r.matched, r.total, f"{r.ratio:.6f}"])


def write_robustness_csv(report: RobustnessReport, path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh)
        out.writerow(["fraction", "accuracy"])
        for f, a in zip(report.missing_fractions, report.accuracy):
            out.writerow([f"{f:.3f}", f"{a:.6f}"])


def write_sweep_csv(rows: list[SweepRow], path: str) -> None:
    """One row per config; similarity ratios become ratio_<n> columns."""
    sizes = sorted({r.n for row in rows for r in row.similarity})
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh)
        out.writerow(
            ["context_length", "hidden_size", "dropout_rate", "accuracy", "error"]
            + [f"ratio_{n}" for n in sizes]
        )
        for row in rows:
            ratios = {r.n: r.ratio for r in row.similarity}
            out.writerow(
                [
                    row.config.context_length,
                    row.config.hidden_size,
                    row.config.dropout_rate,
                    "" if row.accuracy is None else f"{row.accuracy:.6f}",
                    row.error or "",
                ]
                + [f"{ratios[n]:.6f}" if n in ratios else "" for n in sizes]
            )


def format_similarity_table(reports: list[SimilarityReport]) -> str:
    lines = [f"{'n':>3}  {'matched':>8}  {'total':>8}  {'ratio':>7}"]
    for r in reports:
        lines.append(f"{r.n:>3}  {r.matched:>8}  {r.total:>8}  {r.ratio:>7.4f}")
    return "\n".join(lines)


def format_robustness_table(report: RobustnessReport) -> str:
    lines = [f"{'missing':>8}  {'accuracy':>8}"]
    for f, a in zip(report.missing_fractions, report.accuracy):
        lines.append(f"{f:>8.2f}  {a:>8.4f}")
    return "\n".join(lines)

"""Corpus-conditioned predictive writing.

Train a word-level next-word model (corpus-fit embeddings feeding a stacked
recurrent network) on any plain-text corpus, then use it for interactive
suggestions, seed-line story generation, a Markov baseline, and evaluation
experiments.
"""

from .corpus import (
    KEPT_PUNCT,
    UNKNOWN_ID,
    UNKNOWN_WORD,
    EncodedCorpus,
    Token,
    TokenKind,
    Vocabulary,
    Windows,
    build_vocabulary,
    detokenize,
    encode,
    export_vocabulary,
    levenshtein,
    make_windows,
    nearest_word,
    tokenize,
)
from .engine import Engine, ModelNotLoadedError, Suggestion, load_classics
from .evaluation import (
    RobustnessReport,
    SimilarityReport,
    SweepRow,
    ngram_similarity,
    robustness_curve,
    sweep,
)
from .glove import (
    CooccurrenceMatrix,
    GloveConfig,
    GloveParams,
    build_cooccurrence,
    glove_fit,
    glove_fit_params,
    glove_objective,
    glove_weight,
)
from .markov import MarkovModel, markov_generate, markov_next, markov_train
from .modelfile import ModelFileError, load_model, save_model
from .network import (
    AdamState,
    ForwardCache,
    NetworkConfig,
    NetworkParams,
    TrainHistory,
    adam_update,
    backward,
    cross_entropy,
    dropout,
    evaluate,
    forward,
    greedy_ids,
    init_params,
    lstm_step,
    predict_topk,
    softmax,
    train,
)

__version__ = "0.1.0"

"""Synthetic Zipfian corpora for desk-scale experiments."""

import numpy as np

from ..common.logger import get_logger
from .loader import Corpus, build_corpus


def zipf_probabilities(vocab_size: int, exponent: float) -> np.ndarray:
    """Rank-frequency law p(r) proportional to r^-exponent over ranks 1..vocab_size."""
    ranks = np.arange(1, vocab_size + 1, dtype=float)
    weights = ranks ** (-exponent)
    return weights / weights.sum()


def synth_corpus(
    n_users: int,
    tokens_per_user: int,
    vocab_size: int,
    zipf_exponent: float,
    seed: int,
) -> Corpus:
    """Generate a corpus whose tokens follow a truncated Zipf law.

    Token ``w<r>`` is the rank-r word. Every user gets one sequence of
    ``tokens_per_user`` tokens drawn independently. The result depends only
    on the arguments.

    Args:
        n_users: Number of users (0 gives an empty corpus)
        tokens_per_user: Sequence length per user
        vocab_size: Number of distinct words available
        zipf_exponent: Zipf exponent s > 0
        seed: Generator seed

    Returns:
        Synthetic Corpus
    """
    if n_users < 0:
        raise ValueError(f"n_users must be >= 0, got {n_users}")
    if tokens_per_user < 1:
        raise ValueError(f"tokens_per_user must be >= 1, got {tokens_per_user}")
    if vocab_size < 1:
        raise ValueError(f"vocab_size must be >= 1, got {vocab_size}")
    if not zipf_exponent > 0:
        raise ValueError(f"zipf_exponent must be > 0, got {zipf_exponent}")

    rng = np.random.default_rng(seed)
    probabilities = zipf_probabilities(vocab_size, zipf_exponent)
    draws = rng.choice(vocab_size, size=(n_users, tokens_per_user), p=probabilities)

    users = [
        (f"u{i + 1}", [" ".join(f"w{r + 1}" for r in row)])
        for i, row in enumerate(draws)
    ]
    get_logger("corpus").debug(
        f"Synthesized {n_users} users x {tokens_per_user} tokens "
        f"(vocab {vocab_size}, s={zipf_exponent}, seed {seed})"
    )
    return build_corpus(users, lowercase=False)

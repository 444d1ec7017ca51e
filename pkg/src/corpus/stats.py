"""Descriptive statistics of a cleartext corpus.

These read raw user data and are meant for the trusted curator tuning a
run (for example choosing contribution caps), never for release.
"""

from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Tuple

import numpy as np

from .loader import Corpus


@dataclass(frozen=True)
class LengthStats:
    """Per-length k-gram statistics."""

    k: int
    distinct_grams: int
    mean_per_user: float
    median_per_user: float


@dataclass(frozen=True)
class CorpusStats:
    """Size of a corpus and its k-gram profile for k = 1..max_len."""

    n_users: int
    n_sequences: int
    n_tokens: int
    lengths: Tuple[LengthStats, ...]

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return asdict(self)


def corpus_statistics(corpus: Corpus, max_len: int) -> CorpusStats:
    """Count users, sequences, tokens, and distinct k-grams per user.

    Args:
        corpus: Cleartext corpus
        max_len: Longest gram length to profile

    Returns:
        CorpusStats
    """
    if max_len < 1:
        raise ValueError(f"max_len must be >= 1, got {max_len}")

    lengths: List[LengthStats] = []
    for k in range(1, max_len + 1):
        universe = set()
        per_user = []
        for user in corpus:
            grams = user.kgrams(k)
            per_user.append(len(grams))
            universe |= grams
        counts = np.asarray(per_user, dtype=float)
        lengths.append(
            LengthStats(
                k=k,
                distinct_grams=len(universe),
                mean_per_user=float(counts.mean()) if counts.size else 0.0,
                median_per_user=float(np.median(counts)) if counts.size else 0.0,
            )
        )

    return CorpusStats(
        n_users=len(corpus),
        n_sequences=sum(len(u.sequences) for u in corpus),
        n_tokens=sum(u.token_count for u in corpus),
        lengths=tuple(lengths),
    )


def suggest_caps(stats: CorpusStats) -> List[int]:
    """Per-level caps set near the median number of distinct k-grams per user."""
    return [max(1, int(round(s.median_per_user))) for s in stats.lengths]

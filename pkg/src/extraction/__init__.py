"""Extraction module for dpne.

Weighted-gaussian histograms, validity pruning, and the level-by-level
differentially private n-gram extraction.
"""

from .dpne import (
    DpneExtractor,
    ExtractionMode,
    ExtractionResult,
    LevelStats,
    build_level_histogram,
    dpne_extract,
    dpsu_extract_unigrams,
    dpsu_release,
)
from .histogram import (
    WeightedHistogram,
    accumulate,
    build_histogram,
    cap_contribution,
    contribution_norm,
    release_zero_weight,
    threshold_release,
)
from .noise import GramNoise, sample_binomial, stream
from .results import UNSAFE_HEADER, read_result, write_result
from .validity import (
    PruningRule,
    check_validity,
    compose,
    compute_valid_kgrams,
    default_sample_p,
    estimate_valid_kgrams,
    prune_invalid,
    sample_spurious,
)

__all__ = [
    "DpneExtractor",
    "ExtractionMode",
    "ExtractionResult",
    "GramNoise",
    "LevelStats",
    "PruningRule",
    "UNSAFE_HEADER",
    "WeightedHistogram",
    "accumulate",
    "build_histogram",
    "build_level_histogram",
    "cap_contribution",
    "check_validity",
    "compose",
    "compute_valid_kgrams",
    "contribution_norm",
    "default_sample_p",
    "dpne_extract",
    "dpsu_extract_unigrams",
    "dpsu_release",
    "estimate_valid_kgrams",
    "prune_invalid",
    "read_result",
    "release_zero_weight",
    "sample_binomial",
    "sample_spurious",
    "stream",
    "threshold_release",
    "write_result",
]

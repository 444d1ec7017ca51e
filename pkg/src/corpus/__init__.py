"""Corpus module for dpne.

Handles tokenization, corpus loading and synthesis, and k-gram extraction.
"""

from .loader import (
    Corpus,
    CorpusFormat,
    CorpusLoader,
    UserRecord,
    build_corpus,
    load_corpus,
    write_corpus,
)
from .stats import CorpusStats, corpus_statistics, suggest_caps
from .synth import synth_corpus
from .tokens import NGram, TokenTable, extract_kgrams, tokenize, union_kgrams

__all__ = [
    "Corpus",
    "CorpusFormat",
    "CorpusLoader",
    "CorpusStats",
    "NGram",
    "TokenTable",
    "UserRecord",
    "build_corpus",
    "corpus_statistics",
    "extract_kgrams",
    "load_corpus",
    "suggest_caps",
    "synth_corpus",
    "tokenize",
    "union_kgrams",
    "write_corpus",
]

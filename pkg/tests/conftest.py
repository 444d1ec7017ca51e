"""Pytest configuration and shared fixtures."""

import json

import pytest

from src.corpus import build_corpus, synth_corpus


@pytest.fixture
def make_corpus():
    """Factory building a corpus from (user_id, texts) pairs without lowercasing."""

    def factory(users):
        return build_corpus(users, lowercase=False)

    return factory


@pytest.fixture
def abc_corpus(make_corpus):
    """Three users who all wrote the sentence "a b c"."""
    return make_corpus([(f"u{i}", ["a b c"]) for i in range(1, 4)])


@pytest.fixture
def small_zipf_corpus():
    """Small Zipfian corpus with a vocabulary small enough to enumerate V_k."""
    return synth_corpus(
        n_users=400, tokens_per_user=12, vocab_size=30, zipf_exponent=1.1, seed=11
    )


@pytest.fixture
def write_jsonl(tmp_path):
    """Write (user_id, texts) pairs as a jsonl_text corpus file."""

    def writer(users, name="corpus.jsonl"):
        path = tmp_path / name
        with path.open("w", encoding="utf-8") as f:
            for user_id, texts in users:
                f.write(json.dumps({"user_id": user_id, "texts": texts}) + "\n")
        return path

    return writer


@pytest.fixture
def sample_config():
    """Sample configuration dictionary."""
    return {
        "run": {
            "epsilon": 4.0,
            "delta": "1e-7",
            "max_len": 3,
            "delta0": 20,
            "eta": 0.01,
            "seed": 5,
        },
        "logging": {
            "level": "INFO",
        },
    }

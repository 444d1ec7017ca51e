"""Unit tests for the level-by-level extraction."""

import math
from unittest.mock import patch

import pytest

from src.common.errors import SearchSpaceTooLarge
from src.corpus import synth_corpus
from src.extraction.dpne import (
    DpneExtractor,
    ExtractionMode,
    ExtractionResult,
    LevelStats,
    build_level_histogram,
    dpne_extract,
    dpsu_extract_unigrams,
)
from src.extraction.validity import PruningRule, compute_valid_kgrams
from src.privacy.accounting import PrivacyTarget, allocate_schedule, noiseless_schedule

REFERENCE = ExtractionMode.REFERENCE
SCALABLE = ExtractionMode.SCALABLE


@pytest.fixture
def private_schedule():
    """Three-level schedule at epsilon=4, delta=1e-7."""
    return allocate_schedule(PrivacyTarget(4.0, 1e-7), 3, caps=20)


def words(corpus, grams):
    """Token strings of a set of grams."""
    return {" ".join(corpus.tokens.words(g)) for g in grams}


def exact_count(s1, s_prev, p, rng, rule=PruningRule.BOTH_SIDE, sort_key=None):
    """Stand-in for the estimator that returns |V_k| exactly."""
    return len(compute_valid_kgrams(s1, s_prev, rule))


class TestDpsuExtractUnigrams:
    """Tests for dpsu_extract_unigrams."""

    def test_empty_corpus(self, make_corpus):
        """Test that an empty corpus releases nothing."""
        assert dpsu_extract_unigrams(make_corpus([]), 10, 1.0, 1.0) == set()

    def test_noiseless_weights(self, make_corpus):
        """Test two users holding only "a" against rho=1.5."""
        corpus = make_corpus([("u1", ["a"]), ("u2", ["a"]), ("u3", ["b"])])
        assert words(corpus, dpsu_extract_unigrams(corpus, 5, 1.5, 0.0)) == {"a"}

    def test_no_spurious_unigrams(self, small_zipf_corpus):
        """Test that released unigrams always come from some user."""
        universe = small_zipf_corpus.kgram_universe(1)
        for seed in range(5):
            released = dpsu_extract_unigrams(small_zipf_corpus, 10, 3.0, 2.0, seed=seed)
            assert released <= universe


class TestBuildLevelHistogram:
    """Tests for build_level_histogram."""

    def test_prunes_and_caps(self, make_corpus):
        """Test that invalid grams are pruned before capping."""
        corpus = make_corpus([("u1", ["a b c d"])])
        g = corpus.tokens.encode
        s1 = {g(["a"]), g(["b"]), g(["c"])}
        hist = build_level_histogram(corpus, 2, s1, s1, PruningRule.BOTH_SIDE, cap=5)
        assert hist.support() == {g(["a", "b"]), g(["b", "c"])}
        assert hist.weight(g(["a", "b"])) == pytest.approx(1 / math.sqrt(2))

    def test_cap_applies(self, make_corpus):
        """Test that a user contributes at most cap grams."""
        corpus = make_corpus([("u1", ["a b c d"])])
        s1 = {corpus.tokens.encode([w]) for w in "abcd"}
        hist = build_level_histogram(corpus, 2, s1, s1, PruningRule.BOTH_SIDE, cap=1)
        assert len(hist) == 1
        assert next(iter(hist.weights.values())) == 1.0


class TestNoiselessTrace:
    """Tests for the hand-traced noiseless pipeline."""

    @pytest.mark.parametrize("mode", [REFERENCE, SCALABLE])
    def test_abc(self, abc_corpus, mode):
        """Test three users sharing "a b c"."""
        schedule = noiseless_schedule(3, caps=10, threshold=0.5)
        result = dpne_extract(abc_corpus, schedule, mode=mode)
        assert words(abc_corpus, result.level(1)) == {"a", "b", "c"}
        assert words(abc_corpus, result.level(2)) == {"a b", "b c"}
        assert words(abc_corpus, result.level(3)) == {"a b c"}
        assert not result.private

    def test_threshold_blocks_rare(self, make_corpus):
        """Test that a gram held by one user fails a threshold of 1."""
        corpus = make_corpus([("u1", ["x y"]), ("u2", ["x y"]), ("u3", ["z"])])
        result = dpne_extract(corpus, noiseless_schedule(2, caps=4, threshold=1.0))
        assert words(corpus, result.level(1)) == {"x", "y"}
        assert words(corpus, result.level(2)) == {"x y"}


class TestDpneExtract:
    """Tests for private extraction."""

    def test_empty_corpus(self, make_corpus, private_schedule):
        """Test that every level of an empty corpus is empty."""
        result = dpne_extract(make_corpus([]), private_schedule)
        assert result.counts() == [0, 0, 0]
        assert math.isinf(result.stats[1].rho)
        assert result.stats[2].valid_count == 0

    def test_levels_and_stats(self, small_zipf_corpus, private_schedule):
        """Test result shape and per-level statistics."""
        result = dpne_extract(small_zipf_corpus, private_schedule, seed=3)
        assert result.max_len == 3
        assert [s.level for s in result.stats] == [1, 2, 3]
        assert result.stats[0].rho == private_schedule.rho1
        assert result.counts()[0] > 0
        assert result.total() == sum(result.counts())
        for stats in result.stats[1:]:
            assert stats.sample_p is not None
            assert not stats.valid_exact
            assert stats.released == stats.released_from_support + stats.spurious_injected

    def test_deterministic(self, small_zipf_corpus, private_schedule):
        """Test that a seed fixes the output."""
        first = dpne_extract(small_zipf_corpus, private_schedule, seed=8)
        second = dpne_extract(small_zipf_corpus, private_schedule, seed=8)
        assert first.levels == second.levels

    def test_threads_do_not_matter(self, small_zipf_corpus, private_schedule):
        """Test identical output for 1 and 4 workers."""
        single = dpne_extract(small_zipf_corpus, private_schedule, seed=2, workers=1)
        threaded = dpne_extract(small_zipf_corpus, private_schedule, seed=2, workers=4)
        assert single.levels == threaded.levels

    def test_seed_changes_output(self, private_schedule):
        """Test that different seeds can give different releases."""
        corpus = synth_corpus(200, 10, 60, 1.0, seed=1)
        outputs = {
            frozenset(dpne_extract(corpus, private_schedule, seed=s).level(1))
            for s in range(6)
        }
        assert len(outputs) > 1

    def test_debug_keeps_spurious(self, small_zipf_corpus, private_schedule):
        """Test that debug runs record injected grams per level."""
        result = dpne_extract(small_zipf_corpus, private_schedule, seed=1, debug=True)
        assert result.spurious is not None
        assert result.spurious[0] == set()
        for k in range(1, 4):
            assert result.spurious[k - 1] <= result.level(k)
        assert dpne_extract(small_zipf_corpus, private_schedule, seed=1).spurious is None

    def test_reference_mode_exact_count(self, small_zipf_corpus, private_schedule):
        """Test that reference mode reports exact valid counts."""
        result = dpne_extract(small_zipf_corpus, private_schedule, mode=REFERENCE)
        for stats in result.stats[1:]:
            assert stats.valid_exact
            assert stats.sample_p is None

    def test_reference_mode_guard(self, small_zipf_corpus, private_schedule):
        """Test the explicit enumeration limit in reference mode."""
        extractor = DpneExtractor(
            private_schedule, mode=REFERENCE, max_explicit_candidates=1
        )
        with pytest.raises(SearchSpaceTooLarge):
            extractor.extract(small_zipf_corpus)

    def test_reference_and_scalable_share_support_release(self, small_zipf_corpus):
        """Test identical non-spurious level-2 output when |V_2| is known exactly."""
        schedule = allocate_schedule(PrivacyTarget(4.0, 1e-7), 2, caps=20)
        reference = dpne_extract(small_zipf_corpus, schedule, mode=REFERENCE, seed=4, debug=True)
        with patch("src.extraction.dpne.estimate_valid_kgrams", side_effect=exact_count):
            scalable = dpne_extract(small_zipf_corpus, schedule, mode=SCALABLE, seed=4, debug=True)

        assert reference.level(1) == scalable.level(1)
        assert reference.stats[1].rho == scalable.stats[1].rho
        assert (
            reference.level(2) - reference.spurious[1]
            == scalable.level(2) - scalable.spurious[1]
        )

    def test_noiseless_warns(self, abc_corpus, caplog):
        """Test the warning for non-private schedules."""
        with caplog.at_level("WARNING", logger="dpne.extraction"):
            dpne_extract(abc_corpus, noiseless_schedule(1, caps=3))
        assert "NOT differentially private" in caplog.text

    def test_private_run_logs_no_support_split(self, small_zipf_corpus, private_schedule, caplog):
        """Test that a private run keeps raw-histogram counts out of the log."""
        with caplog.at_level("DEBUG", logger="dpne.extraction"):
            dpne_extract(small_zipf_corpus, private_schedule, seed=1)
        assert "Level 2: released" in caplog.text
        assert "from support of" not in caplog.text

    def test_debug_run_logs_support_split(self, small_zipf_corpus, private_schedule, caplog):
        """Test that debug runs log the support and zero-weight split."""
        with caplog.at_level("DEBUG", logger="dpne.extraction"):
            dpne_extract(small_zipf_corpus, private_schedule, seed=1, debug=True)
        assert "from support of" in caplog.text

    def test_private_dict_drops_histogram_counts(self, small_zipf_corpus, private_schedule):
        """Test that a private result serializes no raw-histogram counts."""
        result = dpne_extract(small_zipf_corpus, private_schedule, seed=1)
        for level in result.to_dict()["levels"]:
            assert "spurious_injected" not in level
            assert "released_from_support" not in level
            assert "support_size" not in level


class TestResultTypes:
    """Tests for LevelStats and ExtractionResult."""

    def test_infinite_rho_serializes(self):
        """Test that an infinite threshold becomes the string "inf"."""
        stats = LevelStats(2, 1.0, math.inf, 5, 0, 0, 0)
        assert stats.to_dict()["rho"] == "inf"

    def test_result_helpers(self):
        """Test counts, totals, and level access."""
        result = ExtractionResult("X", [{(1,), (2,)}, {(1, 2)}])
        assert result.counts() == [2, 1]
        assert result.total() == 3
        assert result.level(2) == {(1, 2)}
        assert result.all_grams() == {(1,), (2,), (1, 2)}
        assert result.to_dict()["counts"] == [2, 1]

    def test_no_total(self):
        """Test that runs without a shared budget report no total."""
        result = ExtractionResult("X", [{(1,)}], has_total=False)
        assert result.total() is None
        assert result.to_dict()["total"] is None

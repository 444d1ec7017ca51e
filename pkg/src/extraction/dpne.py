"""Differentially private n-gram extraction.

Level 1 is a plain DPSU release of unigrams. Each higher level k builds a
weighted histogram over k-grams that survive pruning against S_1 and
S_{k-1}, releases the noisy support above rho_k, and then accounts for
valid k-grams that nobody contributed: the reference mode thresholds all of
them explicitly, the scalable mode draws how many would have passed and
samples that many uniformly.
"""

import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Set, Tuple

from ..common.logger import get_logger
from ..corpus.loader import Corpus, UserRecord
from ..corpus.tokens import NGram
from ..privacy.accounting import NoiseSchedule, compute_rho_k, std_normal_cdf
from .histogram import (
    WeightedHistogram,
    build_histogram,
    cap_contribution,
    release_zero_weight,
    threshold_release,
)
from .noise import GramNoise, sample_binomial, stream
from .validity import (
    DEFAULT_MAX_CANDIDATES,
    PruningRule,
    compute_valid_kgrams,
    default_sample_p,
    estimate_valid_kgrams,
    prune_invalid,
    sample_spurious,
)

# Counts taken from the raw histogram; only non-private reports carry them.
CURATOR_FIELDS = ("support_size", "released_from_support", "spurious_injected")


class ExtractionMode(Enum):
    """How zero-weight valid k-grams are handled."""

    REFERENCE = "reference"
    SCALABLE = "scalable"


@dataclass
class LevelStats:
    """What happened at one extraction level."""

    level: int
    sigma: float
    rho: float
    cap: int
    support_size: Optional[int]
    released: int
    released_from_support: Optional[int]
    valid_count: Optional[int] = None
    valid_exact: bool = False
    sample_p: Optional[float] = None
    spurious_injected: Optional[int] = 0

    def to_dict(self, private: bool = False) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization.

        With ``private`` set the counts in CURATOR_FIELDS are left out.
        """
        data = asdict(self)
        if private:
            for name in CURATOR_FIELDS:
                data.pop(name)
        if math.isinf(self.rho):
            data["rho"] = "inf"
        return data


@dataclass
class ExtractionResult:
    """Released n-gram sets S_1..S_T plus per-level statistics.

    ``spurious`` is only filled in debug runs and is never part of a
    private release.
    """

    method: str
    levels: List[Set[NGram]]
    stats: List[LevelStats] = field(default_factory=list)
    private: bool = True
    has_total: bool = True
    spurious: Optional[List[Set[NGram]]] = None

    @property
    def max_len(self) -> int:
        return len(self.levels)

    def level(self, k: int) -> Set[NGram]:
        return self.levels[k - 1]

    def counts(self) -> List[int]:
        return [len(s) for s in self.levels]

    def total(self) -> Optional[int]:
        return sum(self.counts()) if self.has_total else None

    def all_grams(self) -> Set[NGram]:
        grams: Set[NGram] = set()
        for released in self.levels:
            grams |= released
        return grams

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {
            "method": self.method,
            "private": self.private,
            "max_len": self.max_len,
            "counts": self.counts(),
            "total": self.total(),
            "levels": [s.to_dict(private=self.private) for s in self.stats],
        }


def dpsu_release(
    corpus: Corpus,
    lengths: Sequence[int],
    cap: int,
    rho: float,
    sigma: float,
    seed: int = 0,
    stage: int = 1,
    workers: int = 1,
) -> Tuple[Set[NGram], WeightedHistogram]:
    """Weighted-gaussian DPSU over the union of each user's k-grams for ``lengths``.

    Returns:
        Released grams and the histogram they were drawn from
    """
    tokens = corpus.tokens

    def contribution(user: UserRecord) -> Set[NGram]:
        items: Set[NGram] = set()
        for k in lengths:
            items |= user.kgrams(k)
        if len(items) <= cap:
            return items
        return cap_contribution(
            items, cap, stream(seed, stage, "cap", user.user_id), tokens.sort_key
        )

    hist = build_histogram(stage, corpus.users, contribution, cap=cap, workers=workers)
    released = threshold_release(hist, sigma, rho, GramNoise(seed, stage, tokens))
    return released, hist


def dpsu_extract_unigrams(
    corpus: Corpus,
    cap: int,
    rho1: float,
    sigma1: float,
    seed: int = 0,
    workers: int = 1,
) -> Set[NGram]:
    """Release S_1 with the level-1 cap, threshold, and noise."""
    released, _ = dpsu_release(corpus, [1], cap, rho1, sigma1, seed, 1, workers)
    return released


def build_level_histogram(
    corpus: Corpus,
    k: int,
    s1: Set[NGram],
    s_prev: Set[NGram],
    rule: PruningRule,
    cap: int,
    seed: int = 0,
    workers: int = 1,
) -> WeightedHistogram:
    """Histogram of pruned, capped k-grams for level k >= 2."""
    tokens = corpus.tokens

    def contribution(user: UserRecord) -> Set[NGram]:
        items = prune_invalid(user.kgrams(k), s1, s_prev, rule)
        if len(items) <= cap:
            return items
        return cap_contribution(
            items, cap, stream(seed, k, "cap", user.user_id), tokens.sort_key
        )

    return build_histogram(k, corpus.users, contribution, cap=cap, workers=workers)


class DpneExtractor:
    """Runs the level-by-level extraction for one schedule."""

    def __init__(
        self,
        schedule: NoiseSchedule,
        rule: PruningRule = PruningRule.BOTH_SIDE,
        mode: ExtractionMode = ExtractionMode.SCALABLE,
        seed: int = 0,
        workers: int = 1,
        debug: bool = False,
        max_explicit_candidates: int = DEFAULT_MAX_CANDIDATES,
    ):
        """
        Initialize extractor

        Args:
            schedule: Noise schedule (private or noiseless)
            rule: Pruning rule for levels >= 2
            mode: Reference (explicit V_k) or scalable (sampled) handling
            seed: Run seed every random draw is keyed on
            workers: Threads for histogram building
            debug: Keep the injected spurious grams in the result
            max_explicit_candidates: Limit on |S_1| * |S_{k-1}| in reference mode
        """
        self.schedule = schedule
        self.rule = rule
        self.mode = mode
        self.seed = seed
        self.workers = workers
        self.debug = debug
        self.max_explicit_candidates = max_explicit_candidates
        self.logger = get_logger("extraction")

    def extract(self, corpus: Corpus) -> ExtractionResult:
        """Release S_1..S_T from ``corpus``."""
        schedule = self.schedule
        if not schedule.private:
            self.logger.warning(
                "Noiseless schedule: output is NOT differentially private"
            )

        s1, hist1 = dpsu_release(
            corpus,
            [1],
            schedule.cap(1),
            schedule.rho1,
            schedule.sigma(1),
            self.seed,
            1,
            self.workers,
        )
        levels: List[Set[NGram]] = [s1]
        spurious: List[Set[NGram]] = [set()]
        stats = [
            LevelStats(
                level=1,
                sigma=schedule.sigma(1),
                rho=schedule.rho1,
                cap=schedule.cap(1),
                support_size=len(hist1),
                released=len(s1),
                released_from_support=len(s1),
            )
        ]
        self._log_level(stats[0])

        for k in range(2, schedule.max_len + 1):
            released, level_stats, injected = self._extract_level(
                corpus, k, s1, levels[-1]
            )
            levels.append(released)
            spurious.append(injected)
            stats.append(level_stats)
            self._log_level(level_stats)

        return ExtractionResult(
            method="DPNE",
            levels=levels,
            stats=stats,
            private=schedule.private,
            spurious=spurious if self.debug else None,
        )

    def _extract_level(
        self, corpus: Corpus, k: int, s1: Set[NGram], s_prev: Set[NGram]
    ) -> Tuple[Set[NGram], LevelStats, Set[NGram]]:
        schedule = self.schedule
        sigma = schedule.sigma(k)
        cap = schedule.cap(k)

        if not s1 or not s_prev:
            return (
                set(),
                LevelStats(
                    level=k,
                    sigma=sigma,
                    rho=math.inf,
                    cap=cap,
                    support_size=0,
                    released=0,
                    released_from_support=0,
                    valid_count=0,
                    valid_exact=True,
                ),
                set(),
            )

        tokens = corpus.tokens
        sample_p: Optional[float] = None
        valid: Optional[Set[NGram]] = None
        if self.mode is ExtractionMode.REFERENCE:
            valid = compute_valid_kgrams(s1, s_prev, self.rule, self.max_explicit_candidates)
            valid_count = len(valid)
        else:
            sample_p = schedule.sample_p or default_sample_p(len(s1), len(s_prev))
            valid_count = estimate_valid_kgrams(
                s1,
                s_prev,
                sample_p,
                stream(self.seed, k, "estimate"),
                self.rule,
                tokens.sort_key,
            )

        if schedule.private:
            rho = compute_rho_k(sigma, schedule.eta, len(s_prev), valid_count)
        else:
            rho = schedule.threshold_override

        hist = build_level_histogram(
            corpus, k, s1, s_prev, self.rule, cap, self.seed, self.workers
        )
        noise = GramNoise(self.seed, k, tokens)
        from_support = threshold_release(hist, sigma, rho, noise)

        if valid is not None:
            injected = release_zero_weight(
                [g for g in valid if g not in hist], sigma, rho, noise
            )
        else:
            injected = self._inject_spurious(
                k, s1, s_prev, hist, valid_count, sigma, rho, tokens.sort_key
            )

        released = from_support | injected
        level_stats = LevelStats(
            level=k,
            sigma=sigma,
            rho=rho,
            cap=cap,
            support_size=len(hist),
            released=len(released),
            released_from_support=len(from_support),
            valid_count=valid_count,
            valid_exact=valid is not None,
            sample_p=sample_p,
            spurious_injected=len(injected),
        )
        return released, level_stats, injected

    def _inject_spurious(
        self,
        k: int,
        s1: Set[NGram],
        s_prev: Set[NGram],
        hist: WeightedHistogram,
        valid_count: int,
        sigma: float,
        rho: float,
        sort_key: Optional[Callable[[NGram], object]] = None,
    ) -> Set[NGram]:
        if sigma == 0 or math.isinf(rho):
            return set()
        if valid_count < len(hist):
            self.logger.warning(
                f"Level {k}: estimated {valid_count} valid grams is below the "
                "histogram support; injecting none"
            )
        population = max(0, valid_count - len(hist))
        count = sample_binomial(
            population, std_normal_cdf(-rho / sigma), stream(self.seed, k, "binomial")
        )
        return sample_spurious(
            s1,
            s_prev,
            self.rule,
            hist,
            count,
            stream(self.seed, k, "spurious"),
            sort_key=sort_key,
        )

    def _log_level(self, stats: LevelStats) -> None:
        self.logger.info(
            f"Level {stats.level}: released {stats.released}, "
            f"sigma={stats.sigma:.4g}, rho={stats.rho:.4g}"
        )
        # The support split is raw-histogram data: curator debug output only.
        if self.debug or not self.schedule.private:
            self.logger.debug(
                f"Level {stats.level}: {stats.released_from_support} from support of "
                f"{stats.support_size}, {stats.spurious_injected} zero-weight"
            )


def dpne_extract(
    corpus: Corpus,
    schedule: NoiseSchedule,
    rule: PruningRule = PruningRule.BOTH_SIDE,
    mode: ExtractionMode = ExtractionMode.SCALABLE,
    seed: int = 0,
    workers: int = 1,
    debug: bool = False,
) -> ExtractionResult:
    """Extract S_1..S_T from ``corpus`` under ``schedule``.

    Args:
        corpus: Private corpus
        schedule: Noise schedule from allocate_schedule (or noiseless_schedule)
        rule: Pruning rule
        mode: Reference or scalable zero-weight handling
        seed: Run seed
        workers: Histogram-building threads (output does not depend on it)
        debug: Keep injected zero-weight grams in ``result.spurious``

    Returns:
        ExtractionResult
    """
    extractor = DpneExtractor(schedule, rule, mode, seed, workers, debug)
    return extractor.extract(corpus)

"""DPSU baselines and method comparison.

All baselines share DPNE's tokenization, caps, and keyed randomness, so
differences between methods come from the algorithm alone:

- DPSU-all pools grams of every length into one histogram with cap T*delta0.
- DPSU-even runs one DPSU per length with sigma_k = sigma* sqrt(T) and
  delta split evenly across the levels' thresholds.
- DPSU-single spends the whole budget on one length.
"""

import dataclasses
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Set, Tuple

from ..common.logger import get_logger
from ..corpus.loader import Corpus
from ..corpus.tokens import NGram
from ..extraction.dpne import ExtractionResult, LevelStats, dpne_extract, dpsu_release
from ..privacy.accounting import PrivacyTarget, compute_rho1, solve_sigma_star
from .run_config import RunConfig, build_schedule

METHODS = ("dpne", "dpsu_all", "dpsu_even", "dpsu_single")
METHOD_LABELS = {
    "dpne": "DPNE",
    "dpsu_all": "DPSU-all",
    "dpsu_even": "DPSU-even",
    "dpsu_single": "DPSU-single",
}
SWEEP_PARAMETERS = ("eta", "decay", "delta0", "epsilon", "prune")


def _noise_and_threshold(
    epsilon: float,
    delta: float,
    cap: int,
    split: int,
    noiseless_threshold: Optional[float],
) -> Tuple[float, float]:
    if noiseless_threshold is not None:
        return 0.0, noiseless_threshold
    sigma = solve_sigma_star(PrivacyTarget(epsilon, delta)) * math.sqrt(split)
    return sigma, compute_rho1(sigma, delta / split, cap)


def dpsu_all(
    corpus: Corpus,
    epsilon: float,
    delta: float,
    max_len: int,
    delta0: int,
    seed: int = 0,
    workers: int = 1,
    noiseless_threshold: Optional[float] = None,
) -> ExtractionResult:
    """One DPSU over grams of all lengths 1..T, cap T*delta0, split by length.

    Args:
        corpus: Private corpus
        epsilon: Privacy budget
        delta: Privacy delta
        max_len: Longest gram length T
        delta0: Per-length cap; the pooled cap is T*delta0
        seed: Run seed
        workers: Histogram threads
        noiseless_threshold: If set, run without noise at this threshold (unsafe)

    Returns:
        ExtractionResult with one released set per length
    """
    cap = max_len * delta0
    sigma, rho = _noise_and_threshold(epsilon, delta, cap, 1, noiseless_threshold)
    released, hist = dpsu_release(
        corpus, range(1, max_len + 1), cap, rho, sigma, seed, 1, workers
    )

    levels: List[Set[NGram]] = [set() for _ in range(max_len)]
    supports = [0] * max_len
    for gram in released:
        levels[len(gram) - 1].add(gram)
    for gram in hist:
        supports[len(gram) - 1] += 1

    stats = [
        LevelStats(
            level=k,
            sigma=sigma,
            rho=rho,
            cap=cap,
            support_size=supports[k - 1],
            released=len(levels[k - 1]),
            released_from_support=len(levels[k - 1]),
        )
        for k in range(1, max_len + 1)
    ]
    return ExtractionResult(
        method=METHOD_LABELS["dpsu_all"],
        levels=levels,
        stats=stats,
        private=noiseless_threshold is None,
    )


def dpsu_even(
    corpus: Corpus,
    epsilon: float,
    delta: float,
    max_len: int,
    delta0: int,
    seed: int = 0,
    workers: int = 1,
    noiseless_threshold: Optional[float] = None,
) -> ExtractionResult:
    """T independent DPSU runs, one per length, with an even composition split."""
    sigma, rho = _noise_and_threshold(epsilon, delta, delta0, max_len, noiseless_threshold)

    levels: List[Set[NGram]] = []
    stats: List[LevelStats] = []
    for k in range(1, max_len + 1):
        released, hist = dpsu_release(corpus, [k], delta0, rho, sigma, seed, k, workers)
        levels.append(released)
        stats.append(
            LevelStats(
                level=k,
                sigma=sigma,
                rho=rho,
                cap=delta0,
                support_size=len(hist),
                released=len(released),
                released_from_support=len(released),
            )
        )
    return ExtractionResult(
        method=METHOD_LABELS["dpsu_even"],
        levels=levels,
        stats=stats,
        private=noiseless_threshold is None,
    )


def dpsu_single(
    corpus: Corpus,
    epsilon: float,
    delta: float,
    k: int,
    cap: int,
    seed: int = 0,
    workers: int = 1,
    noiseless_threshold: Optional[float] = None,
) -> Set[NGram]:
    """One DPSU run over k-grams only, spending the whole budget."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    sigma, rho = _noise_and_threshold(epsilon, delta, cap, 1, noiseless_threshold)
    released, _ = dpsu_release(corpus, [k], cap, rho, sigma, seed, k, workers)
    return released


def dpsu_single_all_lengths(
    corpus: Corpus,
    epsilon: float,
    delta: float,
    max_len: int,
    delta0: int,
    seed: int = 0,
    workers: int = 1,
    noiseless_threshold: Optional[float] = None,
) -> ExtractionResult:
    """DPSU-single for every k in 1..T, each a separate full-budget run.

    The levels do not add up to one release, so the result has no total.
    """
    levels = [
        dpsu_single(corpus, epsilon, delta, k, delta0, seed, workers, noiseless_threshold)
        for k in range(1, max_len + 1)
    ]
    return ExtractionResult(
        method=METHOD_LABELS["dpsu_single"],
        levels=levels,
        private=noiseless_threshold is None,
        has_total=False,
    )


def _threshold(config: RunConfig) -> Optional[float]:
    return config.noiseless_threshold if config.unsafe_no_privacy else None


def run_method(corpus: Corpus, config: RunConfig, method: str) -> ExtractionResult:
    """Run one named method under ``config``."""
    threshold = _threshold(config)
    if method == "dpne":
        return dpne_extract(
            corpus,
            build_schedule(config),
            config.pruning_rule,
            config.extraction_mode,
            config.seed,
            config.threads,
            debug=config.unsafe_no_privacy,
        )
    baseline_args: Dict[str, Any] = dict(
        epsilon=config.epsilon,
        delta=config.delta,
        max_len=config.max_len,
        delta0=config.delta0,
        seed=config.seed,
        workers=config.threads,
        noiseless_threshold=threshold,
    )
    if method == "dpsu_all":
        return dpsu_all(corpus, **baseline_args)
    if method == "dpsu_even":
        return dpsu_even(corpus, **baseline_args)
    if method == "dpsu_single":
        return dpsu_single_all_lengths(corpus, **baseline_args)
    raise ValueError(f"Unknown method {method!r}; expected one of {list(METHODS)}")


def compare_methods(
    corpus: Corpus, config: RunConfig, methods: Sequence[str] = METHODS
) -> Dict[str, ExtractionResult]:
    """Run each method under the same config and seed, in the order given."""
    logger = get_logger("baselines")
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise ValueError(f"Unknown methods {unknown}; expected a subset of {list(METHODS)}")

    results: Dict[str, ExtractionResult] = {}
    for method in methods:
        result = run_method(corpus, config, method)
        logger.info(f"{METHOD_LABELS[method]}: per-length counts {result.counts()}")
        results[method] = result
    return results


@dataclass(frozen=True)
class SweepPoint:
    """DPNE per-length counts at one value of the swept parameter."""

    parameter: str
    value: Any
    counts: List[int]

    @property
    def total(self) -> int:
        return sum(self.counts)


def run_sweep(
    corpus: Corpus, config: RunConfig, parameter: str, values: Sequence[Any]
) -> List[SweepPoint]:
    """Run DPNE once per value of one hyperparameter, all else fixed.

    Args:
        corpus: Private corpus
        config: Base configuration
        parameter: One of eta, decay, delta0, epsilon, prune
        values: Values to try, in order

    Returns:
        One SweepPoint per value
    """
    if parameter not in SWEEP_PARAMETERS:
        raise ValueError(
            f"Cannot sweep {parameter!r}; expected one of {list(SWEEP_PARAMETERS)}"
        )
    logger = get_logger("baselines")

    points = []
    for value in values:
        changes: Dict[str, Any] = {parameter: value}
        if parameter == "delta0":
            changes["caps"] = None
        swept = dataclasses.replace(config, **changes)
        result = run_method(corpus, swept, "dpne")
        logger.info(f"Sweep {parameter}={value}: total {result.total()}")
        points.append(SweepPoint(parameter, value, result.counts()))
    return points

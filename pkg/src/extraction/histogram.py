"""Weighted-gaussian histograms and noisy threshold release.

Each user adds 1/sqrt(|U_i|) to each of its (capped) items, so one user's
contribution has l2 norm exactly 1. The histogram stores, per gram, how many
users of each set size |U_i| hold it; weights are summed from those integer
counts in a fixed order, which makes them bit-identical however users are
ordered or sharded.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import (
    Callable,
    Collection,
    Dict,
    Iterator,
    List,
    Optional,
    Sequence,
    Set,
    TypeVar,
)

import numpy as np

from ..common.errors import InvariantViolation
from ..common.logger import get_logger
from ..corpus.tokens import NGram
from .noise import GramNoise

UserT = TypeVar("UserT")
NORM_TOLERANCE = 1e-12


class WeightedHistogram:
    """Association from gram to positive weight for one level.

    Zero-weight grams are never stored.
    """

    def __init__(self, level: int):
        self.level = level
        self.contributors = 0
        self._sizes: Dict[NGram, Dict[int, int]] = {}
        self._weights: Optional[Dict[NGram, float]] = None

    def __len__(self) -> int:
        return len(self._sizes)

    def __contains__(self, gram: object) -> bool:
        return gram in self._sizes

    def __iter__(self) -> Iterator[NGram]:
        return iter(self._sizes)

    def accumulate(self, user_items: Collection[NGram]) -> "WeightedHistogram":
        """Add one user's already capped and pruned item set; empty is a no-op."""
        size = len(user_items)
        if size == 0:
            return self
        for gram in user_items:
            counts = self._sizes.setdefault(gram, {})
            counts[size] = counts.get(size, 0) + 1
        self.contributors += 1
        self._weights = None
        return self

    def merge(self, other: "WeightedHistogram") -> "WeightedHistogram":
        """Fold another partial histogram of the same level into this one."""
        if other.level != self.level:
            raise ValueError(f"cannot merge level {other.level} into level {self.level}")
        for gram, counts in other._sizes.items():
            mine = self._sizes.setdefault(gram, {})
            for size, count in counts.items():
                mine[size] = mine.get(size, 0) + count
        self.contributors += other.contributors
        self._weights = None
        return self

    @property
    def weights(self) -> Dict[NGram, float]:
        if self._weights is None:
            self._weights = {
                gram: math.fsum(
                    count / math.sqrt(size) for size, count in sorted(counts.items())
                )
                for gram, counts in self._sizes.items()
            }
        return self._weights

    def weight(self, gram: NGram) -> float:
        return self.weights.get(gram, 0.0)

    def support(self) -> Set[NGram]:
        return set(self._sizes)


def accumulate(hist: WeightedHistogram, user_items: Collection[NGram]) -> WeightedHistogram:
    """Add one user's contribution to ``hist`` and return it."""
    return hist.accumulate(user_items)


def contribution_norm(size: int) -> float:
    """Euclidean norm of a user's weight vector over ``size`` items."""
    if size == 0:
        return 0.0
    per_item = 1.0 / math.sqrt(size)
    return math.sqrt(math.fsum([per_item * per_item] * size))


def cap_contribution(
    items: Collection[NGram],
    cap: int,
    rng: np.random.Generator,
    sort_key: Optional[Callable[[NGram], object]] = None,
) -> Set[NGram]:
    """Keep at most ``cap`` items, chosen uniformly without replacement.

    Items are put in a canonical order before sampling so the choice depends
    only on the generator state.

    Args:
        items: A user's candidate items
        cap: Contribution cap, >= 1
        rng: Generator for the subset draw
        sort_key: Canonical ordering of items (default: natural tuple order)

    Returns:
        ``items`` unchanged when within the cap, otherwise a random subset
    """
    if cap < 1:
        raise ValueError(f"cap must be >= 1, got {cap}")
    if len(items) <= cap:
        return set(items)
    ordered = sorted(items, key=sort_key)
    chosen = rng.choice(len(ordered), size=cap, replace=False)
    return {ordered[i] for i in chosen.tolist()}


def _exceeding(
    grams: Sequence[NGram],
    weights: np.ndarray,
    sigma: float,
    rho: float,
    noise: GramNoise,
) -> Set[NGram]:
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    if not grams or rho == math.inf:
        return set()
    noisy = weights if sigma == 0 else weights + sigma * noise.normals(grams)
    return {gram for gram, keep in zip(grams, (noisy > rho).tolist()) if keep}


def threshold_release(
    hist: WeightedHistogram, sigma: float, rho: float, noise: GramNoise
) -> Set[NGram]:
    """Release every supported gram whose weight plus N(0, sigma^2) exceeds rho.

    Args:
        hist: Histogram whose support is scanned
        sigma: Noise standard deviation (0 only in noiseless debug runs)
        rho: Threshold, or +inf to release nothing
        noise: Gram-keyed noise source

    Returns:
        Released grams
    """
    weights = hist.weights
    grams = list(weights)
    values = np.fromiter(weights.values(), dtype=float, count=len(grams))
    return _exceeding(grams, values, sigma, rho, noise)


def release_zero_weight(
    grams: Collection[NGram], sigma: float, rho: float, noise: GramNoise
) -> Set[NGram]:
    """Noisy thresholding of grams that nobody contributed to."""
    grams = list(grams)
    return _exceeding(grams, np.zeros(len(grams)), sigma, rho, noise)


def _check_contribution(items: Collection[NGram], cap: Optional[int]) -> None:
    if cap is not None and len(items) > cap:
        raise InvariantViolation(f"user contributed {len(items)} items over cap {cap}")
    if contribution_norm(len(items)) > 1.0 + NORM_TOLERANCE:
        raise InvariantViolation("user contribution norm exceeds 1")


def build_histogram(
    level: int,
    users: Sequence[UserT],
    contribution: Callable[[UserT], Collection[NGram]],
    cap: Optional[int] = None,
    workers: int = 1,
) -> WeightedHistogram:
    """Accumulate every user's contribution, optionally in parallel shards.

    Users are split into ``workers`` contiguous shards; partial histograms
    are merged in shard order. ``contribution`` must be safe to call from
    several threads.

    Args:
        level: Histogram level
        users: Users in corpus order
        contribution: Maps a user to its capped, pruned item set
        cap: Cap every contribution is checked against
        workers: Number of shards / threads

    Returns:
        The level's WeightedHistogram
    """
    logger = get_logger("histogram")

    def build_shard(shard: Sequence[UserT]) -> WeightedHistogram:
        partial = WeightedHistogram(level)
        for user in shard:
            items = contribution(user)
            _check_contribution(items, cap)
            partial.accumulate(items)
        return partial

    workers = max(1, min(int(workers), len(users) or 1))
    if workers == 1:
        hist = build_shard(users)
    else:
        bounds = np.linspace(0, len(users), workers + 1).astype(int).tolist()
        shards: List[Sequence[UserT]] = [
            users[bounds[i] : bounds[i + 1]] for i in range(workers)
        ]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(build_shard, shards))
        hist = WeightedHistogram(level)
        for index, partial in enumerate(partials):
            logger.debug(f"Level {level} shard {index}: {len(partial)} grams")
            hist.merge(partial)

    logger.debug(
        f"Level {level} histogram: {len(hist)} grams from {hist.contributors} users"
    )
    return hist

"""Valid k-gram structure built from released shorter n-grams.

A k-gram is valid when its pieces were released at lower levels. Under
both-side pruning its first token and last token must be in S_1 and its
(k-1)-prefix and (k-1)-suffix must be in S_{k-1}; single-side pruning
only checks the prefix and the last token.

Candidates are drawn from the product space holding V_k: S_1 x S_{k-1}
(first token, then suffix) under both-side pruning and S_{k-1} x S_1
(prefix, then last token) under single-side pruning.
"""

import math
from enum import Enum
from typing import Callable, Collection, Container, List, Optional, Set

import numpy as np

from ..common.errors import SamplingBudgetExceeded, SearchSpaceTooLarge
from ..common.logger import get_logger
from ..corpus.tokens import NGram

DEFAULT_MAX_CANDIDATES = 10_000_000
DEFAULT_PROBE_BUDGET = 1_000_000
ESTIMATE_CHUNK = 65_536


class PruningRule(Enum):
    """Which released pieces a k-gram must be made of."""

    BOTH_SIDE = "both"
    SINGLE_SIDE = "single"


def check_validity(
    gram: NGram,
    s1: Container[NGram],
    s_prev: Container[NGram],
    rule: PruningRule = PruningRule.BOTH_SIDE,
) -> bool:
    """Whether ``gram`` (length >= 2) is valid against S_1 and S_{k-1}."""
    if len(gram) < 2:
        raise ValueError(f"validity is defined for k >= 2, got a {len(gram)}-gram")
    if gram[:-1] not in s_prev or (gram[-1],) not in s1:
        return False
    if rule is PruningRule.SINGLE_SIDE:
        return True
    return (gram[0],) in s1 and gram[1:] in s_prev


def compose(rule: PruningRule, unigram: NGram, piece: NGram) -> NGram:
    """Candidate k-gram from a 1-gram and a (k-1)-gram under ``rule``.

    Both-side candidates are x.w; single-side candidates are w.x.
    """
    if rule is PruningRule.SINGLE_SIDE:
        return piece + unigram
    return unigram + piece


def compute_valid_kgrams(
    s1: Collection[NGram],
    s_prev: Collection[NGram],
    rule: PruningRule = PruningRule.BOTH_SIDE,
    max_candidates: int = DEFAULT_MAX_CANDIDATES,
) -> Set[NGram]:
    """Materialize V_k, the valid k-grams.

    Raises:
        SearchSpaceTooLarge: If |S_1| * |S_{k-1}| exceeds ``max_candidates``
    """
    candidates = len(s1) * len(s_prev)
    if candidates > max_candidates:
        raise SearchSpaceTooLarge(
            f"{len(s1)} x {len(s_prev)} = {candidates} candidates exceeds "
            f"the explicit limit of {max_candidates}; use scalable mode"
        )

    s1_set = set(s1)
    prev_set = set(s_prev)
    valid: Set[NGram] = set()
    for piece in prev_set:
        for unigram in s1_set:
            gram = compose(rule, unigram, piece)
            if check_validity(gram, s1_set, prev_set, rule):
                valid.add(gram)
    return valid


def prune_invalid(
    items: Collection[NGram],
    s1: Container[NGram],
    s_prev: Container[NGram],
    rule: PruningRule = PruningRule.BOTH_SIDE,
) -> Set[NGram]:
    """Keep only the valid grams of one user's item set.

    All items must share one length k >= 2.
    """
    lengths = {len(g) for g in items}
    if len(lengths) > 1:
        raise ValueError(f"items mix gram lengths {sorted(lengths)}")
    if lengths and min(lengths) < 2:
        raise ValueError("pruning applies to k >= 2")
    return {g for g in items if check_validity(g, s1, s_prev, rule)}


def default_sample_p(
    size1: int, size_prev: int, probe_budget: int = DEFAULT_PROBE_BUDGET
) -> float:
    """Adaptive sampling probability: about ``probe_budget`` probes, at most 1."""
    space = size1 * size_prev
    if space <= 0:
        return 1.0
    return min(1.0, probe_budget / space)


def _sorted(grams: Collection[NGram], sort_key: Optional[Callable]) -> List[NGram]:
    return sorted(grams, key=sort_key)


def estimate_valid_kgrams(
    s1: Collection[NGram],
    s_prev: Collection[NGram],
    p: float,
    rng: np.random.Generator,
    rule: PruningRule = PruningRule.BOTH_SIDE,
    sort_key: Optional[Callable[[NGram], object]] = None,
) -> int:
    """Unbiased estimate of |V_k| from ceil(p |S_1| |S_{k-1}|) random probes.

    Each probe picks x in S_1 and w in S_{k-1} uniformly and tests the
    candidate composed from them.

    Args:
        s1: Released unigrams
        s_prev: Released (k-1)-grams
        p: Sampling probability in (0, 1]
        rng: Probe generator
        rule: Pruning rule
        sort_key: Canonical ordering of grams

    Returns:
        ceil(valid_probes / p), or 0 when either set is empty
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    if not s1 or not s_prev:
        return 0

    firsts = _sorted(s1, sort_key)
    suffixes = _sorted(s_prev, sort_key)
    s1_set = set(firsts)
    prev_set = set(suffixes)
    probes = math.ceil(p * len(firsts) * len(suffixes))

    hits = 0
    for start in range(0, probes, ESTIMATE_CHUNK):
        size = min(ESTIMATE_CHUNK, probes - start)
        first_idx = rng.integers(len(firsts), size=size).tolist()
        suffix_idx = rng.integers(len(suffixes), size=size).tolist()
        hits += sum(
            1
            for i, j in zip(first_idx, suffix_idx)
            if check_validity(
                compose(rule, firsts[i], suffixes[j]), s1_set, prev_set, rule
            )
        )

    estimate = math.ceil(hits / p)
    get_logger("validity").debug(
        f"Estimated |V| = {estimate} from {hits}/{probes} valid probes (p={p:.3g})"
    )
    return estimate


def default_max_attempts(count: int) -> int:
    return 100 * count + 10_000


def sample_spurious(
    s1: Collection[NGram],
    s_prev: Collection[NGram],
    rule: PruningRule,
    support: Container[NGram],
    count: int,
    rng: np.random.Generator,
    max_attempts: Optional[int] = None,
    sort_key: Optional[Callable[[NGram], object]] = None,
) -> Set[NGram]:
    """Draw ``count`` distinct valid k-grams outside ``support``, uniformly.

    Rejection-samples candidates composed from x in S_1 and w in S_{k-1}.

    Raises:
        SamplingBudgetExceeded: After ``max_attempts`` consecutive rejections
    """
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    if count == 0:
        return set()
    if not s1 or not s_prev:
        raise ValueError("cannot sample spurious grams from an empty S_1 or S_{k-1}")

    budget = default_max_attempts(count) if max_attempts is None else max_attempts
    firsts = _sorted(s1, sort_key)
    suffixes = _sorted(s_prev, sort_key)
    s1_set = set(firsts)
    prev_set = set(suffixes)

    sampled: Set[NGram] = set()
    rejections = 0
    attempts = 0
    while len(sampled) < count:
        attempts += 1
        gram = compose(
            rule,
            firsts[int(rng.integers(len(firsts)))],
            suffixes[int(rng.integers(len(suffixes)))],
        )
        if gram in sampled or gram in support or not check_validity(gram, s1_set, prev_set, rule):
            rejections += 1
            if rejections >= budget:
                raise SamplingBudgetExceeded(len(sampled), count, attempts)
            continue
        sampled.add(gram)
        rejections = 0
    return sampled

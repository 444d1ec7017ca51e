"""Trusted-curator evaluation of a release against its cleartext corpus.

Nothing here is private: K-anonymity coverage and the spurious audit both
read raw user data and exist to measure utility and check the eta bound.
"""

from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional

from ..common.logger import get_logger
from ..corpus.loader import Corpus
from ..extraction.dpne import ExtractionResult


@dataclass(frozen=True)
class CoverageCell:
    """Released share of the k-grams held by at least K users."""

    k: int
    K: int
    numerator: int
    denominator: int

    @property
    def fraction(self) -> Optional[float]:
        """None when no k-gram reaches K users."""
        if self.denominator == 0:
            return None
        return self.numerator / self.denominator

    def to_dict(self) -> Dict[str, Any]:
        return {
            "k": self.k,
            "K": self.K,
            "numerator": self.numerator,
            "denominator": self.denominator,
            "fraction": self.fraction,
        }


@dataclass(frozen=True)
class SpuriousAudit:
    """Released grams that no user holds, per level."""

    per_level: List[int]
    output_total: int

    @property
    def total(self) -> int:
        return sum(self.per_level)

    @property
    def fraction(self) -> float:
        return self.total / self.output_total if self.output_total else 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "per_level": list(self.per_level),
            "total": self.total,
            "output_total": self.output_total,
            "fraction": self.fraction,
        }


@dataclass
class EvalReport:
    """Counts, coverage, and spurious audit of one evaluated result."""

    method: str
    counts: List[int]
    total: Optional[int]
    coverage: List[CoverageCell]
    spurious: SpuriousAudit
    parameters: Dict[str, Any] = field(default_factory=dict)

    def coverage_at(self, k: int, K: int) -> CoverageCell:
        for cell in self.coverage:
            if cell.k == k and cell.K == K:
                return cell
        raise KeyError((k, K))

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {
            "method": self.method,
            "counts": list(self.counts),
            "total": self.total,
            "coverage": [c.to_dict() for c in self.coverage],
            "spurious": self.spurious.to_dict(),
            "parameters": dict(self.parameters),
        }


def gram_user_counts(corpus: Corpus, k: int) -> Counter:
    """Number of distinct users holding each k-gram."""
    counts: Counter = Counter()
    for user in corpus:
        counts.update(user.kgrams(k))
    return counts


def k_anonymity_coverage(
    result: ExtractionResult, corpus: Corpus, thresholds: Iterable[int]
) -> List[CoverageCell]:
    """Coverage cells for every level of ``result`` and every K.

    Args:
        result: Released sets to evaluate
        corpus: Cleartext corpus
        thresholds: User-count thresholds K (each >= 1)

    Returns:
        Cells ordered by k, then K
    """
    thresholds = sorted(set(thresholds))
    if any(K < 1 for K in thresholds):
        raise ValueError(f"K values must be >= 1, got {thresholds}")

    cells: List[CoverageCell] = []
    for k in range(1, result.max_len + 1):
        released = result.level(k)
        user_counts = gram_user_counts(corpus, k)
        for K in thresholds:
            popular = [g for g, n in user_counts.items() if n >= K]
            cells.append(
                CoverageCell(
                    k=k,
                    K=K,
                    numerator=sum(1 for g in popular if g in released),
                    denominator=len(popular),
                )
            )
    return cells


def spurious_audit(result: ExtractionResult, corpus: Corpus) -> SpuriousAudit:
    """Count released grams absent from every user's k-grams, per level."""
    per_level = []
    for k in range(1, result.max_len + 1):
        universe = corpus.kgram_universe(k)
        per_level.append(sum(1 for g in result.level(k) if g not in universe))
    return SpuriousAudit(per_level=per_level, output_total=sum(result.counts()))


def evaluate(
    result: ExtractionResult,
    corpus: Corpus,
    thresholds: Iterable[int],
    parameters: Optional[Dict[str, Any]] = None,
) -> EvalReport:
    """Full evaluation of one result against its corpus."""
    report = EvalReport(
        method=result.method,
        counts=result.counts(),
        total=result.total(),
        coverage=k_anonymity_coverage(result, corpus, thresholds),
        spurious=spurious_audit(result, corpus),
        parameters=dict(parameters or {}),
    )
    get_logger("evaluation").info(
        f"{result.method}: {report.spurious.total} spurious of "
        f"{report.spurious.output_total} released ({report.spurious.fraction:.4f})"
    )
    return report


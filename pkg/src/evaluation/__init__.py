"""Evaluation module for dpne.

DPSU baselines, method comparison, K-anonymity coverage, spurious audits,
and report rendering.
"""

from .baselines import (
    METHOD_LABELS,
    METHODS,
    SWEEP_PARAMETERS,
    SweepPoint,
    compare_methods,
    dpsu_all,
    dpsu_even,
    dpsu_single,
    dpsu_single_all_lengths,
    run_method,
    run_sweep,
)
from .coverage import (
    CoverageCell,
    EvalReport,
    SpuriousAudit,
    evaluate,
    gram_user_counts,
    k_anonymity_coverage,
    spurious_audit,
)
from .report import (
    TableRow,
    coverage_csv,
    render_csv,
    render_table,
    rows_from_results,
    sweep_csv,
    to_json,
)
from .run_config import RUN_CONFIG_FILE, RunConfig, build_schedule

__all__ = [
    "METHODS",
    "METHOD_LABELS",
    "RUN_CONFIG_FILE",
    "SWEEP_PARAMETERS",
    "CoverageCell",
    "EvalReport",
    "RunConfig",
    "SpuriousAudit",
    "SweepPoint",
    "TableRow",
    "build_schedule",
    "compare_methods",
    "coverage_csv",
    "dpsu_all",
    "dpsu_even",
    "dpsu_single",
    "dpsu_single_all_lengths",
    "evaluate",
    "gram_user_counts",
    "k_anonymity_coverage",
    "render_csv",
    "render_table",
    "rows_from_results",
    "run_method",
    "run_sweep",
    "spurious_audit",
    "sweep_csv",
    "to_json",
]

"""Rendering of comparison tables, coverage series, and sweeps."""

import csv
import io
import json
from dataclasses import dataclass
from typing import Any, List, Mapping, Optional, Sequence

from ..extraction.dpne import ExtractionResult
from .baselines import SweepPoint
from .coverage import EvalReport

MISSING = "-"


@dataclass(frozen=True)
class TableRow:
    """One method's per-length counts; ``total`` is None when not meaningful."""

    label: str
    counts: List[int]
    total: Optional[int]


def rows_from_results(results: Mapping[str, ExtractionResult]) -> List[TableRow]:
    return [TableRow(r.method, r.counts(), r.total()) for r in results.values()]


def _header(rows: Sequence[TableRow]) -> List[str]:
    width = max((len(r.counts) for r in rows), default=0)
    return ["method"] + [f"k={k}" for k in range(1, width + 1)] + ["total"]


def _cells(row: TableRow, width: int, thousands: bool) -> List[str]:
    fmt = "{:,}" if thousands else "{}"
    counts = [fmt.format(c) for c in row.counts]
    counts += [MISSING] * (width - len(counts))
    total = MISSING if row.total is None else fmt.format(row.total)
    return [row.label] + counts + [total]


def render_table(rows: Sequence[TableRow]) -> str:
    """Aligned text table: lengths across, methods down, then a total column."""
    header = _header(rows)
    width = len(header) - 2
    body = [_cells(r, width, thousands=True) for r in rows]
    widths = [max(len(line[i]) for line in [header] + body) for i in range(len(header))]

    def fmt(line: List[str]) -> str:
        first = line[0].ljust(widths[0])
        rest = [cell.rjust(w) for cell, w in zip(line[1:], widths[1:])]
        return "  ".join([first] + rest).rstrip()

    lines = [fmt(header), "-" * len(fmt(header))]
    lines.extend(fmt(line) for line in body)
    return "\n".join(lines) + "\n"


def render_csv(rows: Sequence[TableRow]) -> str:
    """Same rows as render_table, as CSV with an empty total where absent."""
    header = _header(rows)
    width = len(header) - 2
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        cells = _cells(row, width, thousands=False)
        writer.writerow(["" if c == MISSING else c for c in cells])
    return buffer.getvalue()


def coverage_csv(reports: Sequence[EvalReport]) -> str:
    """Coverage series: method,k,K,numerator,denominator,fraction."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["method", "k", "K", "numerator", "denominator", "fraction"])
    for report in reports:
        for cell in report.coverage:
            fraction = "" if cell.fraction is None else repr(cell.fraction)
            writer.writerow(
                [report.method, cell.k, cell.K, cell.numerator, cell.denominator, fraction]
            )
    return buffer.getvalue()


def sweep_csv(points: Sequence[SweepPoint]) -> str:
    """Sweep series: parameter,value, one column per length, total."""
    width = max((len(p.counts) for p in points), default=0)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["parameter", "value"] + [f"k={k}" for k in range(1, width + 1)] + ["total"])
    for point in points:
        writer.writerow([point.parameter, point.value] + list(point.counts) + [point.total])
    return buffer.getvalue()


def to_json(data: Any) -> str:
    """Deterministic JSON for anything with a ``to_dict`` or plain data."""
    if hasattr(data, "to_dict"):
        data = data.to_dict()
    elif isinstance(data, (list, tuple)):
        data = [d.to_dict() if hasattr(d, "to_dict") else d for d in data]
    return json.dumps(data, indent=2, sort_keys=True) + "\n"

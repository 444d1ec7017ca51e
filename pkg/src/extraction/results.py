"""Reading and writing extraction outputs.

An output directory holds ``level_<k>.tsv`` per level (tab-separated token
strings, one gram per line, sorted by token strings) and ``report.json``.
Unsafe debug outputs carry a warning header line and a trailing
``spurious``/``genuine`` column.
"""

import json
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Set

from ..common.logger import get_logger
from ..corpus.tokens import NGram, TokenTable
from .dpne import CURATOR_FIELDS, ExtractionResult, LevelStats

UNSAFE_HEADER = "# UNSAFE-NO-PRIVACY: output is not differentially private"
REPORT_FILE = "report.json"
SPURIOUS_FLAG = "spurious"
GENUINE_FLAG = "genuine"


def level_path(out_dir: Path, k: int) -> Path:
    return Path(out_dir) / f"level_{k}.tsv"


def _level_lines(
    grams: Set[NGram],
    tokens: TokenTable,
    spurious: Optional[Set[NGram]],
) -> List[str]:
    lines = []
    for gram in sorted(grams, key=tokens.sort_key):
        line = tokens.render(gram)
        if spurious is not None:
            line += "\t" + (SPURIOUS_FLAG if gram in spurious else GENUINE_FLAG)
        lines.append(line)
    return lines


def write_result(
    result: ExtractionResult,
    tokens: TokenTable,
    out_dir: Path,
    unsafe: bool = False,
    extra: Optional[Dict[str, Any]] = None,
) -> List[Path]:
    """Write level files and report.json into ``out_dir``.

    Args:
        result: Extraction to serialize
        tokens: Token table the result's grams are interned in
        out_dir: Output directory (created if missing)
        unsafe: Stamp the unsafe header and write the spurious flag column
        extra: Additional report fields, e.g. the schedule

    Returns:
        Paths written
    """
    logger = get_logger("extraction")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    written = []
    for k, grams in enumerate(result.levels, start=1):
        spurious = None
        if unsafe:
            spurious = result.spurious[k - 1] if result.spurious else set()
        lines = _level_lines(grams, tokens, spurious)
        if unsafe:
            lines.insert(0, UNSAFE_HEADER)
        path = level_path(out_dir, k)
        path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
        written.append(path)

    report = result.to_dict()
    report["unsafe_no_privacy"] = unsafe
    if extra:
        report.update(extra)
    report_path = out_dir / REPORT_FILE
    report_path.write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    written.append(report_path)

    logger.info(f"Wrote {len(result.levels)} level files and {REPORT_FILE} to {out_dir}")
    return written


def _stats_from_dict(data: Dict[str, Any]) -> LevelStats:
    data = dict(data)
    for name in CURATOR_FIELDS:
        data.setdefault(name, None)
    if data.get("rho") == "inf":
        data["rho"] = math.inf
    return LevelStats(**data)


def read_result(out_dir: Path, tokens: TokenTable) -> ExtractionResult:
    """Load an output directory written by write_result.

    Words absent from ``tokens`` are interned, so released spurious grams
    built from known tokens map back to the corpus ids.

    Raises:
        FileNotFoundError: If report.json or a level file is missing
    """
    out_dir = Path(out_dir)
    report_path = out_dir / REPORT_FILE
    if not report_path.exists():
        raise FileNotFoundError(f"No {REPORT_FILE} in {out_dir}")
    report = json.loads(report_path.read_text(encoding="utf-8"))

    unsafe = bool(report.get("unsafe_no_privacy", False))
    levels: List[Set[NGram]] = []
    spurious: List[Set[NGram]] = []
    for k in range(1, int(report["max_len"]) + 1):
        path = level_path(out_dir, k)
        if not path.exists():
            raise FileNotFoundError(f"Missing level file {path}")
        grams: Set[NGram] = set()
        flagged: Set[NGram] = set()
        lines = path.read_text(encoding="utf-8").splitlines()
        if unsafe and lines and lines[0] == UNSAFE_HEADER:
            lines = lines[1:]
        for line in lines:
            words = line.split("\t")
            if unsafe:
                words, flag = words[:-1], words[-1]
            gram = tuple(tokens.intern(w) for w in words)
            grams.add(gram)
            if unsafe and flag == SPURIOUS_FLAG:
                flagged.add(gram)
        levels.append(grams)
        spurious.append(flagged)

    return ExtractionResult(
        method=report.get("method", "DPNE"),
        levels=levels,
        stats=[_stats_from_dict(s) for s in report.get("levels", [])],
        private=bool(report.get("private", True)),
        has_total=report.get("total") is not None,
        spurious=spurious if unsafe else None,
    )

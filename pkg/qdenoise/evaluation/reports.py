"""
Report export: per-kind and per-level CSV tables plus a full-precision
``summary.json``. Output is deterministic, so re-exporting the same summary
produces identical bytes.
"""
from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import asdict
from pathlib import Path
from typing import Dict, List, Sequence

from ..fileio import PathLike, atomic_write_text
from ..metrics import FidelityReportRow
from .analysis import HISTOGRAM_EDGES, PUBLISHED_REFERENCE, EvalSummary

logger = logging.getLogger(__name__)

CSV_HEADER = ["group", "noisy_fidelity", "corrected_fidelity", "improvement"]
BY_KIND_FILE = "by_noise_type.csv"
BY_LEVEL_FILE = "by_noise_level.csv"
SUMMARY_FILE = "summary.json"


class ReportError(OSError):
    """Raised when a report or heatmap file cannot be written."""

    def __init__(self, path: PathLike, reason: str):
        self.path = str(path)
        self.reason = reason
        super().__init__(f"Could not write '{path}': {reason}")


def rows_to_csv(rows: Sequence[FidelityReportRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([
            row.group,
            f"{row.noisy_fidelity:.3f}",
            f"{row.corrected_fidelity:.3f}",
            f"{row.improvement:.3f}",
        ])
    return buffer.getvalue()


def _row_dict(row: FidelityReportRow) -> Dict:
    out = asdict(row)
    out["relative_improvement"] = row.relative_improvement
    return out


def summary_to_dict(summary: EvalSummary) -> Dict:
    return {
        "corrector": summary.corrector,
        "by_noise_type": [_row_dict(r) for r in summary.by_kind],
        "by_noise_level": [_row_dict(r) for r in summary.by_level],
        "overall": _row_dict(summary.overall),
        "overall_root_fidelity": _row_dict(summary.overall_root),
        "level_fidelity_correlation": summary.correlation,
        "negative_improvement_count": summary.negative_count,
        "negative_improvement_indices": list(summary.negative_indices),
        "flagged_indices": list(summary.flagged_indices),
        "improvement_histogram": {"edges": HISTOGRAM_EDGES, "counts": list(summary.histogram)},
        "mae": summary.mae,
        "test_samples": summary.total,
        "paper_reference": PUBLISHED_REFERENCE,
    }


def export_reports(summary: EvalSummary, out_dir: PathLike) -> List[Path]:
    """Writes the two CSV tables and ``summary.json`` into ``out_dir``."""
    if summary.overall.count == 0 or not summary.by_kind:
        raise ValueError("Refusing to export an empty evaluation summary.")
    out_dir = Path(out_dir)
    payloads = {
        BY_KIND_FILE: rows_to_csv(summary.by_kind),
        BY_LEVEL_FILE: rows_to_csv(summary.by_level),
        SUMMARY_FILE: json.dumps(summary_to_dict(summary), indent=2, sort_keys=True) + "\n",
    }
    written = []
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for name, text in payloads.items():
            written.append(atomic_write_text(out_dir / name, text))
    except OSError as e:
        raise ReportError(out_dir, str(e)) from e
    logger.info("Wrote %d report files to %s", len(written), out_dir)
    return written

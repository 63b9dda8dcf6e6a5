"""
Post-training evaluation: correctors, fidelity summaries, CSV/JSON reports
and density-matrix heatmaps.
"""
from .analysis import (
    HISTOGRAM_EDGES,
    PUBLISHED_REFERENCE,
    EvalSummary,
    SampleEvaluation,
    UndefinedCorrelationError,
    correlation,
    evaluate_corrections,
    reconstruct_state,
)
from .correctors import Corrector, IdentityCorrector, ModelCorrector, OracleCorrector
from .heatmaps import decode_pgm, encode_pgm, export_heatmaps, from_gray, to_gray
from .reports import ReportError, export_reports, rows_to_csv, summary_to_dict

BASELINE_CORRECTORS = {
    IdentityCorrector.name: IdentityCorrector,
    OracleCorrector.name: OracleCorrector,
}

__all__ = [
    "HISTOGRAM_EDGES",
    "PUBLISHED_REFERENCE",
    "BASELINE_CORRECTORS",
    "EvalSummary",
    "SampleEvaluation",
    "UndefinedCorrelationError",
    "correlation",
    "evaluate_corrections",
    "reconstruct_state",
    "Corrector",
    "IdentityCorrector",
    "ModelCorrector",
    "OracleCorrector",
    "decode_pgm",
    "encode_pgm",
    "export_heatmaps",
    "from_gray",
    "to_gray",
    "ReportError",
    "export_reports",
    "rows_to_csv",
    "summary_to_dict",
]

"""Curve ingestion, smoothing and simulation."""

from .ingest import IngestResult, ingest_csv
from .smooth import RawRecord, SmoothCurve, eval_curve, fit_smooth, smooth_curves

__all__ = [
    "IngestResult",
    "ingest_csv",
    "RawRecord",
    "SmoothCurve",
    "eval_curve",
    "fit_smooth",
    "smooth_curves",
]

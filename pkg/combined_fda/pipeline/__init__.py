"""Command orchestration: inputs, analysis stages, artifacts and the run manifest."""

from .runner import PipelineRunner, run_pipeline
from .schemas import CcaReport, ErrorResponse, RunConfig, RunManifest, ScaleReport

__all__ = ["PipelineRunner", "run_pipeline", "CcaReport", "ErrorResponse", "RunConfig", "RunManifest", "ScaleReport"]

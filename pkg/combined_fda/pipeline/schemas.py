"""Pydantic schemas for run configuration and JSON artifacts."""

from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field

from ..data.simgen import ModelName

Command = Literal["smooth", "align", "fcpca", "fccca", "simulate", "benchmark", "replicate"]


class RunConfig(BaseModel):
    """One CLI invocation."""

    command: Command
    input_path: Optional[Path] = None
    output_dir: Path = Path("results")
    grid_k: int = Field(101, ge=11)
    m: int = Field(2, ge=1)
    lam: Optional[float] = Field(None, gt=0)
    seed: int = 0
    model: ModelName = "pca_model"
    n: int = Field(100, ge=2)
    reps: int = Field(100, ge=1)
    noise_sd: float = Field(0.316, ge=0)
    format: Literal["csv", "json"] = "csv"
    deriv_order: int = Field(0, ge=0, le=3)
    m_max: int = Field(5, ge=1)


class ErrorResponse(BaseModel):
    """Machine-readable failure."""

    error: str
    detail: Optional[str] = None


class RunManifest(BaseModel):
    """run.json: what ran, with which software, and how long each stage took."""

    command: str
    status: Literal["ok", "error"]
    config: Dict[str, Any]
    seed: int
    versions: Dict[str, str]
    timings: Dict[str, float]
    artifacts: List[str] = []
    warnings: List[str] = []
    error: Optional[ErrorResponse] = None


class ScanPoint(BaseModel):
    log10_value: float
    objective: float


class ScaleReport(BaseModel):
    """C.json."""

    C: float
    m: int
    mse: float
    degenerate: bool
    scan: List[ScanPoint]
    explained_variance_ratio: List[float]


class CcaReport(BaseModel):
    """cca_report.json."""

    lam: float = Field(serialization_alias="lambda")
    correlations: List[float]
    slopes: List[float]
    cv_correlation: Optional[float] = None
    cv_scan: List[ScanPoint] = []
    truncated: bool = False
    warnings: List[str] = []

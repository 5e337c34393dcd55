"""Application configuration using pydantic-settings."""

from functools import lru_cache
from pathlib import Path

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Analysis settings loaded from environment variables (prefix ``FCPCA_``)."""

    # Parallelism
    threads: int = 1

    # Evaluation grid
    grid_k: int = 101

    # Smoothing
    smoothing_degree: int = 4
    penalty_order: int = 2
    gcv_log10_min: float = -10.0
    gcv_log10_max: float = 2.0
    gcv_points: int = 41

    # Alignment
    align_tol: float = 1e-4
    align_max_iter: int = 20
    karcher_tol: float = 1e-9
    karcher_max_iter: int = 100

    # Scale parameter search
    c_log10_min: float = -3.0
    c_log10_max: float = 3.0
    c_scan_points: int = 25
    default_m: int = 2

    # Regularized CCA
    cca_log10_min: float = -8.0
    cca_log10_max: float = 0.0
    cca_grid_points: int = 17

    # Output
    output_dir: Path = Path("results")
    csv_float_format: str = "%.17g"
    log_level: str = "INFO"

    class Config:
        env_prefix = "FCPCA_"
        env_file = ".env"
        env_file_encoding = "utf-8"
        extra = "ignore"


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()

"""Command-line entry point: ``python -m combined_fda.main <command> [flags]``."""

import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from .config import get_settings
from .pipeline.runner import run_pipeline
from .pipeline.schemas import ErrorResponse, RunConfig


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(
        prog="combined-fda",
        description="Functional combined PCA/CCA of amplitude and phase variation",
    )
    parser.add_argument(
        "command",
        choices=["smooth", "align", "fcpca", "fccca", "simulate", "benchmark", "replicate"],
    )
    parser.add_argument("--input", dest="input_path", help="curve CSV (id,t1..tk header); simulated when omitted")
    parser.add_argument("--out", dest="output_dir", default=str(settings.output_dir))
    parser.add_argument("--grid-k", dest="grid_k", type=int, default=settings.grid_k)
    parser.add_argument("--m", type=int, default=settings.default_m, help="components for C / canonical pairs")
    parser.add_argument("--lambda", dest="lam", type=float, help="smoothing (smooth) or CCA penalty (fccca)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--model", default="pca_model", choices=["pca_model", "cca_model", "toy_linear", "toy_quadratic"]
    )
    parser.add_argument("--n", type=int, default=100)
    parser.add_argument("--reps", type=int, default=100)
    parser.add_argument("--noise-sd", dest="noise_sd", type=float, default=0.316)
    parser.add_argument("--format", choices=["csv", "json"], default="csv")
    parser.add_argument("--deriv-order", dest="deriv_order", type=int, default=0)
    parser.add_argument("--m-max", dest="m_max", type=int, default=5)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse flags, run the command, print an error document on failure."""
    settings = get_settings()
    logging.basicConfig(
        level=settings.log_level.upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)

    try:
        config = RunConfig(**vars(args))
    except ValidationError as e:
        print(ErrorResponse(error="ValidationError", detail=str(e)).model_dump_json())
        return 2

    status, error = run_pipeline(config, settings)
    if error is not None:
        print(error.model_dump_json())
    return status


if __name__ == "__main__":
    sys.exit(main())

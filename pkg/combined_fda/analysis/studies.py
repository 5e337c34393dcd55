"""Replicate studies for the combined PCA and CCA simulation models."""

import logging
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from ..data.simgen import SimConfig, SimDataset, generate
from ..data.smooth import RawRecord
from ..geometry import SampledCurve
from .align import AlignmentResult
from .baselines import mse_comparison
from .decompose import decompose_records
from .fccca import fit_cca
from .fcpca import estimate_C, fit_eigen

logger = logging.getLogger(__name__)


def signed_l2_distance(a: np.ndarray, b: np.ndarray, weights: np.ndarray) -> float:
    """min over s in {+1,-1} of the weighted L2 distance between a and s*b."""
    plus = np.sqrt(np.sum(weights * (a - b) ** 2))
    minus = np.sqrt(np.sum(weights * (a + b) ** 2))
    return float(min(plus, minus))


def unit(v: np.ndarray, weights: np.ndarray) -> np.ndarray:
    norm = np.sqrt(np.sum(weights * v**2))
    return v / norm if norm > 0 else v


def replicate_seed(seed: int, rep: int) -> int:
    return int(np.random.SeedSequence([seed, rep]).generate_state(1)[0])


def decompose(dataset: SimDataset) -> Tuple[AlignmentResult, List[SampledCurve]]:
    """Smooth the observed curves of a simulated dataset, then align them."""
    records = [RawRecord.from_curve(f, id=i) for f, i in zip(dataset.fs, dataset.ids)]
    alignment, smoothed, _ = decompose_records(records, dataset.grid)
    return alignment, smoothed


def pca_replicate(dataset: SimDataset, m: int = 2) -> Dict[str, float]:
    """Table-style statistics for one pca_model replicate."""
    alignment, smoothed = decompose(dataset)
    estimate = estimate_C(alignment.aligned, alignment.phases, smoothed, m=m)
    model = fit_eigen(alignment.aligned, alignment.phases, estimate.C)
    truth = dataset.truth
    w = dataset.grid.glued_weights()
    scale = truth["variance_scale"]
    return {
        "C_hat": estimate.C,
        "lambda1_hat": float(model.eigenvalues[0] * scale),
        "lambda2_hat": float(model.eigenvalues[1] * scale),
        "mean_error": float(np.sqrt(np.sum(w * (truth["mean"] - model.mean) ** 2))),
        "xi1_error": signed_l2_distance(truth["eigenfunctions"][0], model.eigenfunctions[0], w),
        "xi2_error": signed_l2_distance(truth["eigenfunctions"][1], model.eigenfunctions[1], w),
    }


def cca_replicate(dataset: SimDataset, lam: Optional[float] = None) -> Dict[str, float]:
    """Table-style statistics for one cca_model replicate."""
    alignment, _ = decompose(dataset)
    model = fit_cca(alignment.aligned, alignment.phases, lam=lam, n_pairs=1)
    truth = dataset.truth
    w = dataset.grid.weights
    return {
        "rho1_hat": float(model.correlations[0]),
        "rho1_validated": float(model.cv_correlation) if model.cv_correlation is not None else float("nan"),
        "lambda": model.lam,
        "psi_y_error": signed_l2_distance(truth["psi_y"], unit(model.weights_y[0], w), w),
        "psi_x_error": signed_l2_distance(truth["psi_x"], unit(model.weights_x[0], w), w),
    }


def toy_replicate(dataset: SimDataset, m_max: int = 2) -> Dict[str, float]:
    """MSE of the three reconstruction methods for m = 1..m_max."""
    alignment, smoothed = decompose(dataset)
    row: Dict[str, float] = {}
    for curve in mse_comparison(alignment.aligned, alignment.phases, smoothed, m_max):
        for m, value in zip(curve.m_values, curve.mse):
            row[f"{curve.method}_m{m}"] = float(value)
    return row


REPLICATES: Dict[str, Callable[[SimDataset], Dict[str, float]]] = {
    "pca_model": pca_replicate,
    "cca_model": cca_replicate,
    "toy_linear": toy_replicate,
    "toy_quadratic": toy_replicate,
}


def run_replicates(
    model: str,
    n: int,
    reps: int,
    seed: int,
    k: int = 101,
    noise_sd: float = 0.316,
    **kwargs: Any,
) -> pd.DataFrame:
    """Run ``reps`` independent replicates and collect one row of statistics per replicate."""
    rows = []
    for rep in range(reps):
        config = SimConfig(n=n, k=k, seed=replicate_seed(seed, rep), noise_sd=noise_sd, model=model)
        dataset = generate(config)
        stats = REPLICATES[model](dataset, **kwargs)
        rows.append({"replicate": rep, "seed": config.seed, "resampled": dataset.resampled, **stats})
        logger.info("replicate %d/%d done", rep + 1, reps)
    return pd.DataFrame(rows)


def summarize(replicates: pd.DataFrame) -> pd.DataFrame:
    """Mean and standard deviation of every statistic column."""
    stats = replicates.drop(columns=["replicate", "seed", "resampled"], errors="ignore")
    return pd.DataFrame({"statistic": stats.columns, "mean": stats.mean().values, "sd": stats.std(ddof=1).values})

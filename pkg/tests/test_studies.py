"""Replicate studies on the simulation models.

The study reproductions are marked slow; run them with ``pytest -m slow``.
"""

import numpy as np
import pytest

from combined_fda.analysis.fccca import fit_cca
from combined_fda.analysis.fcpca import fit_eigen
from combined_fda.analysis.studies import (
    replicate_seed,
    run_replicates,
    signed_l2_distance,
    summarize,
)
from combined_fda.data.simgen import SimConfig, generate


def test_signed_distance_ignores_sign():
    w = np.full(5, 0.25)
    a = np.array([1.0, 0.0, -1.0, 2.0, 0.5])
    assert signed_l2_distance(a, -a, w) == 0.0
    assert signed_l2_distance(a, a, w) == 0.0
    assert signed_l2_distance(a, np.zeros(5), w) == pytest.approx(np.sqrt(np.sum(w * a**2)))


def test_replicate_seeds_are_distinct():
    seeds = {replicate_seed(0, rep) for rep in range(50)}
    assert len(seeds) == 50
    assert replicate_seed(3, 7) == replicate_seed(3, 7)


def test_summary_columns():
    table = run_replicates("toy_linear", n=6, reps=2, seed=1, k=31)
    summary = summarize(table)
    assert "fcpca_m1" in summary["statistic"].tolist()
    assert "replicate" not in summary["statistic"].tolist()


def test_scores_are_decorrelated(pca_decomposition):
    alignment, _ = pca_decomposition
    model = fit_eigen(alignment.aligned, alignment.phases, 1.0)
    cov = np.cov(model.scores, rowvar=False)
    off = cov - np.diag(np.diag(cov))
    assert np.max(np.abs(off)) <= 1e-6 * model.eigenvalues[0]


@pytest.mark.slow
def test_combined_pca_study():
    table = run_replicates("pca_model", n=100, reps=100, seed=2024)
    assert 0.9 <= table["C_hat"].mean() <= 1.7
    assert 3.3 <= table["lambda1_hat"].mean() <= 4.4
    assert 2.3 <= table["lambda2_hat"].mean() <= 3.2
    assert table["xi1_error"].mean() <= 0.9


@pytest.mark.slow
def test_combined_cca_study():
    table = run_replicates("cca_model", n=100, reps=100, seed=2024)
    assert 0.55 <= table["rho1_hat"].mean() <= 0.88
    assert table["psi_y_error"].mean() <= 0.9


@pytest.mark.slow
def test_linear_toy_favours_combined_pca():
    table = run_replicates("toy_linear", n=100, reps=20, seed=2024, m_max=2)
    best = table[["fcpca_m1", "fpca_m1", "composite_m1"]].idxmin(axis=1)
    assert (best == "fcpca_m1").sum() >= 18


@pytest.mark.slow
def test_quadratic_toy_keeps_combined_pca_competitive():
    table = run_replicates("toy_quadratic", n=100, reps=20, seed=2024, m_max=2)
    best = table[["fcpca_m2", "fpca_m2", "composite_m2"]].min(axis=1)
    assert (table["fcpca_m2"] <= 1.25 * best).sum() >= 18


@pytest.mark.slow
def test_independent_phase_and_amplitude_validate_weakly():
    passed = 0
    for rep in range(100):
        seed = replicate_seed(77, rep)
        ys = generate(SimConfig(n=100, seed=seed, model="cca_model", noise_sd=0.0)).ys_true
        xs = generate(SimConfig(n=100, seed=seed + 1, model="cca_model", noise_sd=0.0)).xs_true
        passed += fit_cca(ys, xs, n_pairs=1).cv_correlation < 0.5
    assert passed >= 90

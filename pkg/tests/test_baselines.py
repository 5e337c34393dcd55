"""FPCA and composite-FPCA comparators."""

import numpy as np
import pytest

from combined_fda.analysis.baselines import (
    MseCurve,
    composite_mse,
    composite_reconstruct,
    fpca_mse,
    mse_comparison,
)
from combined_fda.data.simgen import SimConfig, generate
from combined_fda.geometry import SampledCurve, TangentFunction, TimeGrid, compose_amplitude_phase


@pytest.fixture(scope="module")
def toy():
    return generate(SimConfig(n=12, k=51, seed=8, model="toy_linear", noise_sd=0.0))


def test_fpca_matches_dense_projection():
    rng = np.random.default_rng(1)
    grid = TimeGrid.uniform(11)
    fs = [SampledCurve(grid, rng.normal(size=grid.k)) for _ in range(5)]
    data = np.vstack([f.values for f in fs])
    mean = data.mean(axis=0)
    root = np.sqrt(grid.weights)
    cov = (data - mean).T @ (data - mean) / 4
    vals, vecs = np.linalg.eigh(root[:, None] * cov * root[None, :])
    basis = vecs[:, np.argsort(vals)[::-1]]
    for m in range(1, 5):
        top = basis[:, :m]
        approx = mean + (((data - mean) * root) @ top @ top.T) / root
        expected = np.mean((approx - data) ** 2 @ grid.weights)
        assert fpca_mse(fs, m) == pytest.approx(expected, rel=1e-8, abs=1e-14)


def test_fpca_error_decreases_to_zero(toy):
    errors = [fpca_mse(toy.fs, m) for m in range(1, len(toy.fs))]
    assert np.all(np.diff(errors) <= 1e-12)
    scale = np.mean([f.norm**2 for f in toy.fs])
    assert errors[-1] <= 1e-10 * scale


def test_composite_full_rank_reproduces_curves(toy):
    ys, xs, fs = toy.ys_true, toy.xs_true, toy.fs_true
    scale = np.mean([f.norm**2 for f in fs])
    assert composite_mse(ys, xs, fs, len(fs) - 1) <= 1e-8 * scale


def test_composite_counts_scores(toy):
    recon = composite_reconstruct(toy.ys_true, toy.xs_true, 1)
    assert recon.scores_used == 2
    assert len(recon.curves) == len(toy.ys_true)


def test_composite_with_shared_amplitude_is_phase_only():
    grid = TimeGrid.uniform(41)
    t = grid.points
    y = SampledCurve(grid, np.sin(np.pi * t) ** 2)
    rng = np.random.default_rng(3)
    xs = [TangentFunction.project(grid, 0.05 * rng.normal() * (t - 0.5) + 0.02 * rng.normal() * (t - 0.5) ** 2) for _ in range(6)]
    fs = [compose_amplitude_phase(y, x) for x in xs]

    X = np.vstack([x.values for x in xs])
    mean = X.mean(axis=0)
    u, s, vt = np.linalg.svd((X - mean) * np.sqrt(grid.weights), full_matrices=False)
    comp = vt[0] / np.sqrt(grid.weights)
    scores = (X - mean) @ (comp * grid.weights)
    expected = []
    for i, f in enumerate(fs):
        approx = compose_amplitude_phase(y, TangentFunction.project(grid, mean + scores[i] * comp))
        expected.append(grid.inner(approx.values - f.values, approx.values - f.values))
    assert composite_mse([y] * 6, xs, fs, 1) == pytest.approx(np.mean(expected), rel=1e-6, abs=1e-14)


def test_mse_curve_validation():
    with pytest.raises(ValueError):
        MseCurve("fpca", np.arange(1, 3), np.array([1.0]))
    with pytest.raises(ValueError):
        MseCurve("fpca", np.arange(1, 3), np.array([1.0, -1.0]))


def test_comparison_layout(toy):
    curves = mse_comparison(toy.ys_true, toy.xs_true, toy.fs_true, m_max=2)
    assert [c.method for c in curves] == ["fcpca", "fpca", "composite"]
    for c in curves:
        np.testing.assert_array_equal(c.m_values, [1, 2])
        assert np.all(c.mse >= 0)
    assert curves[0].c_values is not None and np.all(curves[0].c_values > 0)
    assert curves[1].c_values is None

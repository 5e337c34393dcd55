"""Simulation generators."""

import numpy as np
import pytest
from pydantic import ValidationError

from combined_fda.config import Settings
from combined_fda.data import simgen
from combined_fda.data.simgen import (
    SimConfig,
    amplitude_basis,
    gen_toy_dataset,
    generate,
    phase_basis,
)
from combined_fda.errors import PhaseDomainError
from combined_fda.geometry import TimeGrid, compose_amplitude_phase


def gram(rows, weights):
    return (rows * weights) @ rows.T


def test_bases_are_orthonormal(grid):
    np.testing.assert_allclose(gram(amplitude_basis(grid), grid.weights), np.eye(4), atol=1e-10)
    pha = phase_basis(grid)
    np.testing.assert_allclose(gram(pha, grid.weights), np.eye(4), atol=1e-10)
    np.testing.assert_allclose(pha @ grid.weights, 0.0, atol=1e-10)


def test_pca_truth_is_glued_orthonormal():
    dataset = generate(SimConfig(n=3, seed=0))
    xi = dataset.truth["eigenfunctions"]
    np.testing.assert_allclose(gram(xi, dataset.grid.glued_weights()), np.eye(4), atol=1e-10)


def test_pca_eigenfunctions_live_on_one_block():
    dataset = generate(SimConfig(n=2, k=41, seed=0))
    xi = dataset.truth["eigenfunctions"]
    np.testing.assert_array_equal(xi[:2, 41:], 0.0)
    np.testing.assert_array_equal(xi[2:, :41], 0.0)
    assert np.all(np.linalg.norm(xi[:2, :41], axis=1) > 0)
    assert np.all(np.linalg.norm(xi[2:, 41:], axis=1) > 0)


@pytest.mark.parametrize("k", [51, 101, 201])
def test_pca_component_variances_do_not_depend_on_grid_size(k):
    dataset = generate(SimConfig(n=5, k=k, seed=4, noise_sd=0.0))
    lam = dataset.truth["eigenvalues"] / dataset.truth["variance_scale"]
    grid = dataset.grid
    for z, x in zip(dataset.scores_true, dataset.xs_true):
        expected = np.sqrt(np.sum(lam[2:] * z[2:] ** 2))
        assert grid.norm(x.values) == pytest.approx(expected, rel=1e-8)


@pytest.mark.parametrize("model", ["pca_model", "cca_model", "toy_linear", "toy_quadratic"])
def test_same_seed_same_data(model):
    a = generate(SimConfig(n=5, k=31, seed=9, model=model))
    b = generate(SimConfig(n=5, k=31, seed=9, model=model))
    for fa, fb in zip(a.fs, b.fs):
        np.testing.assert_array_equal(fa.values, fb.values)
    np.testing.assert_array_equal(a.scores_true, b.scores_true)
    assert a.ids == ["s0001", "s0002", "s0003", "s0004", "s0005"]


def test_serial_and_threaded_generation_agree(monkeypatch):
    serial = generate(SimConfig(n=8, k=31, seed=3))
    monkeypatch.setattr("combined_fda.utils.parallel.get_settings", lambda: Settings(threads=4))
    threaded = generate(SimConfig(n=8, k=31, seed=3))
    for fa, fb in zip(serial.fs, threaded.fs):
        np.testing.assert_array_equal(fa.values, fb.values)


def test_phases_are_mean_zero_and_curves_compose():
    dataset = generate(SimConfig(n=6, k=51, seed=1, model="cca_model"))
    grid = dataset.grid
    for y, x, f in zip(dataset.ys_true, dataset.xs_true, dataset.fs_true):
        assert abs(grid.integral(x.values)) <= 1e-10
        np.testing.assert_allclose(compose_amplitude_phase(y, x).values, f.values, atol=1e-12)


def test_noise_level():
    dataset = generate(SimConfig(n=50, k=101, seed=6, noise_sd=0.5))
    resid = np.concatenate([f.values - g.values for f, g in zip(dataset.fs, dataset.fs_true)])
    assert np.std(resid) == pytest.approx(0.5, rel=0.05)


def test_zero_noise_keeps_truth():
    dataset = generate(SimConfig(n=3, k=21, seed=2, noise_sd=0.0))
    for f, g in zip(dataset.fs, dataset.fs_true):
        np.testing.assert_array_equal(f.values, g.values)


def test_config_validation():
    with pytest.raises(ValidationError):
        SimConfig(n=1)
    with pytest.raises(ValidationError):
        SimConfig(noise_sd=-0.1)
    with pytest.raises(ValidationError):
        SimConfig(model="growth")


def test_toy_generator_rejects_other_models():
    with pytest.raises(ValueError):
        gen_toy_dataset(SimConfig(n=3, model="pca_model"))


def test_resampling_is_counted(monkeypatch):
    calls = {"n": 0}
    real = simgen.compose_amplitude_phase

    def flaky(y, x):
        calls["n"] += 1
        if calls["n"] == 1:
            raise PhaseDomainError(-1.0)
        return real(y, x)

    monkeypatch.setattr(simgen, "compose_amplitude_phase", flaky)
    dataset = generate(SimConfig(n=3, k=21, seed=0))
    assert dataset.resampled == 1
    assert len(dataset.fs) == 3


@pytest.mark.slow
def test_pca_score_variances():
    dataset = generate(SimConfig(n=10000, seed=0, noise_sd=0.0))
    np.testing.assert_allclose(dataset.scores_true.var(axis=0), 1.0, rtol=0.05)


@pytest.mark.slow
def test_cca_score_correlations():
    scores = generate(SimConfig(n=10000, seed=0, model="cca_model", noise_sd=0.0)).scores_true
    u, v = scores[:, :4], scores[:, 4:]
    corr = np.corrcoef(u.T, v.T)[:4, 4:]
    assert corr[0, 1] == pytest.approx(0.8, abs=0.02)
    mask = np.ones_like(corr, dtype=bool)
    mask[0, 1] = False
    assert np.max(np.abs(corr[mask])) <= 0.03


@pytest.mark.slow
def test_toy_score_associations():
    linear = generate(SimConfig(n=10000, seed=0, model="toy_linear", noise_sd=0.0)).scores_true
    assert np.corrcoef(linear.T)[0, 1] == pytest.approx(0.95, abs=0.01)
    quad = generate(SimConfig(n=10000, seed=0, model="toy_quadratic", noise_sd=0.0)).scores_true
    assert abs(np.corrcoef(quad.T)[0, 1]) <= 0.05
    assert np.corrcoef(quad[:, 0] ** 2, quad[:, 1])[0, 1] == pytest.approx(1.0, abs=1e-10)


def test_uniform_grid(grid):
    assert generate(SimConfig(n=2, k=grid.k)).grid.matches(TimeGrid.uniform(grid.k))

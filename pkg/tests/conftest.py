"""Shared fixtures: grids and small simulated datasets."""

import numpy as np
import pytest

from combined_fda.analysis.studies import decompose
from combined_fda.config import get_settings
from combined_fda.data.simgen import SimConfig, generate
from combined_fda.geometry import TimeGrid


@pytest.fixture
def grid():
    return TimeGrid.uniform(101)


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


@pytest.fixture(autouse=True)
def fresh_settings():
    """Environment-driven settings are re-read by every test."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture(scope="session")
def pca_dataset():
    return generate(SimConfig(n=30, seed=11, model="pca_model"))


@pytest.fixture(scope="session")
def pca_decomposition(pca_dataset):
    alignment, smoothed = decompose(pca_dataset)
    return alignment, smoothed

"""Functional combined PCA.

Amplitude y and phase x are glued into one function on [0,2] with the phase
half scaled by C, then decomposed jointly. C is chosen to minimize the m-term
reconstruction error measured back in the original function space.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence

import numpy as np

from ..errors import PhaseDomainError
from ..geometry import SampledCurve, TangentFunction, TimeGrid, compose_amplitude_phase
from ..geometry.types import check_same_grid
from ..utils.search import LogSearchResult, scan_then_golden
from .pca import weighted_pca

logger = logging.getLogger(__name__)

FLAT_OBJECTIVE_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class GluedSample:
    """[y, C x] on the glued grid (first k: amplitude, last k: scaled phase)."""

    values: np.ndarray
    scale_C: float


@dataclass(frozen=True, eq=False)
class CombinedEigenModel:
    """Sample eigen-decomposition of glued functions at a fixed C."""

    grid: TimeGrid
    scale_C: float
    mean: np.ndarray
    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray
    scores: np.ndarray

    @property
    def k(self) -> int:
        return self.grid.k

    @property
    def n_components(self) -> int:
        return self.eigenvalues.size

    @property
    def explained_variance_ratio(self) -> np.ndarray:
        total = self.eigenvalues.sum()
        if total <= 0:
            return np.zeros_like(self.eigenvalues)
        return self.eigenvalues / total

    def amplitude_part(self, glued: np.ndarray) -> np.ndarray:
        return glued[..., : self.k]

    def phase_part(self, glued: np.ndarray) -> np.ndarray:
        """Phase half with the C scaling removed."""
        return glued[..., self.k :] / self.scale_C

    def split(self, glued: np.ndarray):
        y = SampledCurve(self.grid, self.amplitude_part(glued))
        x = TangentFunction.project(self.grid, self.phase_part(glued))
        return y, x

    def compose(self, glued: np.ndarray) -> SampledCurve:
        y, x = self.split(glued)
        return compose_amplitude_phase(y, x)


@dataclass(frozen=True)
class CEstimate:
    """Selected scale parameter with its search trace."""

    C: float
    m: int
    mse: float
    degenerate: bool
    search: Optional[LogSearchResult] = None


def glue(y: SampledCurve, x: TangentFunction, C: float) -> GluedSample:
    if C <= 0:
        raise ValueError(f"scale parameter C must be positive, got {C}")
    check_same_grid(y, x)
    return GluedSample(values=np.concatenate([y.values, C * x.values]), scale_C=float(C))


def fit_eigen(ys: Sequence[SampledCurve], xs: Sequence[TangentFunction], C: float) -> CombinedEigenModel:
    """Eigen-decomposition of the glued sample at scale C.

    Args:
        ys: Amplitude functions
        xs: Phase functions (same count and grid)
        C: Scale parameter

    Returns:
        CombinedEigenModel with n-1 components
    """
    if len(ys) != len(xs):
        raise ValueError(f"{len(ys)} amplitude functions but {len(xs)} phase functions")
    if len(ys) < 2:
        raise ValueError("fit_eigen needs at least two samples")
    grid = ys[0].grid
    glued = np.vstack([glue(y, x, C).values for y, x in zip(ys, xs)])
    pca = weighted_pca(glued, grid.glued_weights())
    return CombinedEigenModel(
        grid=grid,
        scale_C=float(C),
        mean=pca.mean,
        eigenvalues=pca.eigenvalues,
        eigenfunctions=pca.components,
        scores=pca.scores,
    )


def _check_m(model: CombinedEigenModel, m: int) -> None:
    if not 1 <= m <= model.n_components:
        raise ValueError(f"m must be between 1 and {model.n_components}, got {m}")


def project_Am(model: CombinedEigenModel, i: int, m: int) -> SampledCurve:
    """Sample i rebuilt from its first m combined scores and composed back to a curve."""
    _check_m(model, m)
    glued = model.mean + model.scores[i, :m] @ model.eigenfunctions[:m]
    try:
        return model.compose(glued)
    except PhaseDomainError as e:
        raise e.with_context(sample=i, m=m) from e


def _mse_for_model(model: CombinedEigenModel, fs: Sequence[SampledCurve], m: int) -> float:
    grid = model.grid
    total = 0.0
    for i, f in enumerate(fs):
        try:
            approx = project_Am(model, i, m)
            total += grid.inner(approx.values - f.values, approx.values - f.values)
        except PhaseDomainError:
            total += grid.inner(f.values, f.values)
    return total / len(fs)


def reconstruction_mse(
    ys: Sequence[SampledCurve],
    xs: Sequence[TangentFunction],
    fs: Sequence[SampledCurve],
    C: float,
    m: int,
) -> float:
    """Mean squared L2 error of m-term reconstructions in the original space.

    Reconstructions that leave the domain of phi^-1 cost ||f_i||^2.
    """
    model = fit_eigen(ys, xs, C)
    return _mse_for_model(model, fs, min(m, model.n_components))


def estimate_C(
    ys: Sequence[SampledCurve],
    xs: Sequence[TangentFunction],
    fs: Sequence[SampledCurve],
    m: int = 2,
    log10_min: float = -3.0,
    log10_max: float = 3.0,
    scan_points: int = 25,
    xtol: float = 1e-3,
    map_fn: Callable[[Callable, Iterable], Iterable] = map,
) -> CEstimate:
    """Select C by golden-section search on log10 C after a coarse scan.

    A flat objective (relative range below 1e-10 across the scan, e.g. no phase
    variation) returns C = 1 with ``degenerate`` set.
    """
    if m < 1:
        raise ValueError(f"m must be at least 1, got {m}")

    search = scan_then_golden(
        lambda u: reconstruction_mse(ys, xs, fs, 10.0**u, m),
        log10_min,
        log10_max,
        scan_points,
        xtol=xtol,
        map_fn=map_fn,
    )
    if search.relative_scan_range < FLAT_OBJECTIVE_RTOL:
        logger.warning("reconstruction error is flat in C; using C = 1")
        return CEstimate(C=1.0, m=m, mse=float(search.scan_values[0]), degenerate=True, search=search)

    logger.info("selected C = %.4g (m=%d, mse=%.4g)", search.best, m, search.best_value)
    return CEstimate(C=search.best, m=m, mse=search.best_value, degenerate=False, search=search)


def mode_of_variation(model: CombinedEigenModel, component: int, z: float) -> SampledCurve:
    """Mean perturbed by z * sqrt(lambda) along one combined component (1-based), composed back."""
    if not 1 <= component <= model.n_components:
        raise ValueError(f"component must be between 1 and {model.n_components}, got {component}")
    lam = max(float(model.eigenvalues[component - 1]), 0.0)
    glued = model.mean + z * np.sqrt(lam) * model.eigenfunctions[component - 1]
    try:
        return model.compose(glued)
    except PhaseDomainError as e:
        raise e.with_context(z=z) from e


def mode_family(model: CombinedEigenModel, component: int, zs: Sequence[float] = (-1.0, 0.0, 1.0)) -> List[SampledCurve]:
    return [mode_of_variation(model, component, z) for z in zs]

"""Comparators for combined PCA: FPCA on unaligned curves and composite (separate) FPCA."""

import logging
from dataclasses import dataclass
from typing import Callable, Iterable, List, Literal, Optional, Sequence

import numpy as np

from ..errors import PhaseDomainError
from ..geometry import SampledCurve, TangentFunction, compose_amplitude_phase
from .fcpca import estimate_C
from .pca import weighted_pca

logger = logging.getLogger(__name__)

Method = Literal["fcpca", "fpca", "composite"]


@dataclass(frozen=True, eq=False)
class MseCurve:
    """Reconstruction error as a function of the number of components."""

    method: Method
    m_values: np.ndarray
    mse: np.ndarray
    c_values: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.m_values.shape != self.mse.shape:
            raise ValueError("m_values and mse must have equal length")
        if np.any(self.mse < 0):
            raise ValueError("mse must be nonnegative")


def fpca_mse(fs: Sequence[SampledCurve], m: int) -> float:
    """Mean squared L2 error of m-term linear FPCA reconstructions of the raw curves."""
    if len(fs) < 2:
        raise ValueError("fpca_mse needs at least two curves")
    grid = fs[0].grid
    data = np.vstack([f.values for f in fs])
    pca = weighted_pca(data, grid.weights)
    resid = pca.reconstruct(min(m, pca.rank)) - data
    return float(np.mean(resid**2 @ grid.weights))


@dataclass(frozen=True, eq=False)
class CompositeReconstruction:
    curves: List[Optional[SampledCurve]]
    scores_used: int


def composite_reconstruct(
    ys: Sequence[SampledCurve], xs: Sequence[TangentFunction], m: int
) -> CompositeReconstruction:
    """Truncate amplitude and phase expansions separately at m terms, then compose.

    Entries are None where the truncated phase leaves the domain of phi^-1.
    """
    if len(ys) < 2:
        raise ValueError("composite reconstruction needs at least two samples")
    grid = ys[0].grid
    amp = weighted_pca(np.vstack([y.values for y in ys]), grid.weights)
    pha = weighted_pca(np.vstack([x.values for x in xs]), grid.weights)
    m_y, m_x = min(m, amp.rank), min(m, pha.rank)
    y_hat = amp.reconstruct(m_y)
    x_hat = pha.reconstruct(m_x)

    curves: List[Optional[SampledCurve]] = []
    for i in range(len(ys)):
        try:
            curves.append(
                compose_amplitude_phase(SampledCurve(grid, y_hat[i]), TangentFunction.project(grid, x_hat[i]))
            )
        except PhaseDomainError:
            curves.append(None)
    return CompositeReconstruction(curves=curves, scores_used=m_y + m_x)


def composite_mse(
    ys: Sequence[SampledCurve],
    xs: Sequence[TangentFunction],
    fs: Sequence[SampledCurve],
    m: int,
) -> float:
    """Mean squared L2 error of composite reconstructions against fs.

    Out-of-domain phases cost ||f_i||^2, as in the combined method.
    """
    grid = fs[0].grid
    recon = composite_reconstruct(ys, xs, m)
    errors = []
    for approx, f in zip(recon.curves, fs):
        if approx is None:
            errors.append(grid.inner(f.values, f.values))
        else:
            errors.append(grid.inner(approx.values - f.values, approx.values - f.values))
    return float(np.mean(errors))


def mse_comparison(
    ys: Sequence[SampledCurve],
    xs: Sequence[TangentFunction],
    fs: Sequence[SampledCurve],
    m_max: int,
    map_fn: Callable[[Callable, Iterable], Iterable] = map,
    **c_search,
) -> List[MseCurve]:
    """MSE against m = 1..m_max for combined PCA (C re-selected per m), FPCA and composite FPCA.

    Args:
        ys, xs: Aligned amplitudes and centered phases
        fs: Curves the reconstructions are compared against
        m_max: Largest number of components
        map_fn: Mapper for the C scan
        c_search: Extra keyword arguments for estimate_C

    Returns:
        Three MseCurve records: fcpca, fpca, composite
    """
    m_values = np.arange(1, m_max + 1)
    estimates = [estimate_C(ys, xs, fs, m=int(m), map_fn=map_fn, **c_search) for m in m_values]
    curves = [
        MseCurve("fcpca", m_values, np.array([e.mse for e in estimates]), np.array([e.C for e in estimates])),
        MseCurve("fpca", m_values, np.array([fpca_mse(fs, int(m)) for m in m_values])),
        MseCurve("composite", m_values, np.array([composite_mse(ys, xs, fs, int(m)) for m in m_values])),
    ]
    for c in curves:
        logger.info("%s mse: %s", c.method, np.array2string(c.mse, precision=4))
    return curves

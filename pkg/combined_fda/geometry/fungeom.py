"""Geometry of warping functions.

Warps are mapped to the positive orthant of the unit sphere in L2[0,1] by their
square-root slope (SRVF), and from there to the tangent space at the constant
function 1 by the log map. Tangent vectors ("phase functions") can be added,
averaged and scaled, then sent back through the exp map and integration.
"""

import logging
from typing import Sequence, Union

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator

from ..errors import ConvergenceError, GeodesicDomainError, GridValidationError, PhaseDomainError
from .grid import TimeGrid
from .types import (
    GridFunction,
    SampledCurve,
    SphereFunction,
    SrvfPoint,
    TangentFunction,
    WarpingFunction,
    check_same_grid,
)

logger = logging.getLogger(__name__)

SINGULAR_EPS = 1e-10
LOG_DOMAIN_MARGIN = 1e-6

UnitFunction = Union[SphereFunction, GridFunction]


def _clamped_cos(grid: TimeGrid, a: np.ndarray, b: np.ndarray) -> float:
    return float(np.clip(grid.inner(a, b), -1.0, 1.0))


def _log_values(grid: TimeGrid, q: np.ndarray, mu: np.ndarray) -> np.ndarray:
    """Log map on raw arrays, valid for any distance below pi."""
    cos_d = _clamped_cos(grid, q, mu)
    d = float(np.arccos(cos_d))
    if d < SINGULAR_EPS:
        return np.zeros_like(q)
    return (d / np.sin(d)) * (q - cos_d * mu)


def _exp_values(grid: TimeGrid, x: np.ndarray, mu: np.ndarray) -> np.ndarray:
    r = grid.norm(x)
    if r < SINGULAR_EPS:
        return np.array(mu, dtype=float)
    out = (np.sin(r) / r) * x + np.cos(r) * mu
    return out / grid.norm(out)


def srvf_of_warp(gamma: WarpingFunction) -> SrvfPoint:
    """Square root of the warp's slope, renormalized onto the unit sphere."""
    grid = gamma.grid
    bad = np.flatnonzero(np.diff(gamma.values) <= 0)
    if bad.size:
        raise GridValidationError("warping function is not strictly increasing", index=int(bad[0]) + 1)
    slope = np.gradient(gamma.values, grid.points)
    q = np.sqrt(np.clip(slope, 0.0, None))
    return SrvfPoint(grid, q / grid.norm(q))


def warp_of_srvf(q: SphereFunction) -> WarpingFunction:
    """Integrate q squared and pin the endpoint to 1."""
    grid = q.grid
    cum = grid.cumulative(q.values**2)
    gamma = cum / cum[-1]
    gamma[0] = 0.0
    gamma[-1] = 1.0
    return WarpingFunction(grid, gamma)


def geodesic_distance(a: UnitFunction, b: UnitFunction) -> float:
    """Arc length between two unit-norm functions."""
    check_same_grid(a, b)
    return float(np.arccos(_clamped_cos(a.grid, a.values, b.values)))


def log_map(q: UnitFunction, mu: SphereFunction) -> TangentFunction:
    """Inverse exponential map at ``mu``; defined while d(q, mu) < pi/2."""
    d = geodesic_distance(q, mu)
    if d < SINGULAR_EPS:
        return TangentFunction.zero(q.grid, base=mu)
    if d >= np.pi / 2 - LOG_DOMAIN_MARGIN:
        raise GeodesicDomainError(d)
    return TangentFunction(q.grid, _log_values(q.grid, q.values, mu.values), base=mu)


def exp_map(x: TangentFunction, mu: SphereFunction) -> SphereFunction:
    """Exponential map at ``mu``. Output is renormalized to unit norm."""
    check_same_grid(x, mu)
    overlap = x.grid.inner(x.values, mu.values)
    if abs(overlap) > 1e-6 * max(1.0, x.norm):
        raise GridValidationError(f"tangent vector is not orthogonal to the base point ({overlap:.3g})")
    return SphereFunction(x.grid, _exp_values(x.grid, x.values, mu.values))


def phi(gamma: WarpingFunction) -> TangentFunction:
    """Phase function of a warp: log at 1 of its SRVF."""
    return log_map(srvf_of_warp(gamma), SphereFunction.constant_one(gamma.grid))


def phi_inverse(x: TangentFunction) -> WarpingFunction:
    """Warp whose phase function is ``x``.

    Raises:
        GridValidationError: x is not tangent at the constant function 1.
        PhaseDomainError: Exp(x) is not positive on the interior.
    """
    grid = x.grid
    if x.base is not None and not np.allclose(x.base.values, 1.0, rtol=0.0, atol=1e-12):
        raise GridValidationError("phase functions must be tangent vectors at the constant function 1")
    if x.norm < SINGULAR_EPS:
        return WarpingFunction.identity(grid)
    e = _exp_values(grid, x.values, np.ones(grid.k))
    lowest = float(e[1:-1].min())
    if lowest <= 0.0:
        raise PhaseDomainError(lowest)
    return warp_of_srvf(SphereFunction(grid, e))


def warp_curve(f: GridFunction, gamma: WarpingFunction) -> SampledCurve:
    """f composed with gamma, with f interpolated by a cubic spline."""
    check_same_grid(f, gamma)
    spline = CubicSpline(f.grid.points, f.values)
    return SampledCurve(f.grid, spline(gamma.values))


def invert_warp(gamma: WarpingFunction) -> WarpingFunction:
    """gamma^-1 by monotone cubic (PCHIP) interpolation of the swapped graph."""
    grid = gamma.grid
    inverse = PchipInterpolator(gamma.values, grid.points)(grid.points)
    inverse[0], inverse[-1] = 0.0, 1.0
    return WarpingFunction(grid, inverse)


def compose_warps(outer: WarpingFunction, inner: WarpingFunction) -> WarpingFunction:
    """outer(inner(t)) with outer interpolated by PCHIP, which keeps it monotone."""
    check_same_grid(outer, inner)
    grid = outer.grid
    values = PchipInterpolator(grid.points, outer.values)(inner.values)
    values[0], values[-1] = 0.0, 1.0
    return WarpingFunction(grid, values)


def compose_amplitude_phase(y: SampledCurve, x: TangentFunction) -> SampledCurve:
    """f = y o phi^-1(x)."""
    check_same_grid(y, x)
    if x.norm < SINGULAR_EPS:
        return SampledCurve(y.grid, y.values)
    return warp_curve(y, phi_inverse(x))


def karcher_mean_sphere(
    points: Sequence[UnitFunction],
    tol: float = 1e-9,
    max_iter: int = 100,
) -> SphereFunction:
    """Intrinsic mean on the unit sphere under geodesic distance.

    Args:
        points: Unit-norm functions on one grid.
        tol: Stop when the mean of the log-mapped points has norm below this.
        max_iter: Iteration cap.

    Returns:
        The Karcher mean.

    Raises:
        ConvergenceError: tolerance not reached; ``estimate`` holds the last iterate.
    """
    if not points:
        raise ValueError("karcher_mean_sphere needs at least one point")
    grid = points[0].grid
    for p in points[1:]:
        check_same_grid(points[0], p)
    stack = np.vstack([p.values for p in points])

    mean = stack.mean(axis=0)
    mean_norm = grid.norm(mean)
    if mean_norm == 0.0:
        raise ValueError("points average to zero; the Karcher mean is undefined")
    mean = mean / mean_norm

    step_norm = np.inf
    for _ in range(max_iter):
        step = np.mean([_log_values(grid, row, mean) for row in stack], axis=0)
        step_norm = grid.norm(step)
        if step_norm < tol:
            return SphereFunction(grid, mean)
        mean = _exp_values(grid, step, mean)

    raise ConvergenceError(
        f"Karcher mean did not converge in {max_iter} iterations",
        final_norm=step_norm,
        estimate=SphereFunction(grid, mean),
    )

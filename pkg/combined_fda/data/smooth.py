"""Penalized B-spline smoothing with GCV-selected smoothing parameter."""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import BSpline
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from ..errors import SmoothingError
from ..geometry import SampledCurve, TimeGrid
from ..utils.parallel import parallel_map
from ..utils.search import scan_then_golden

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RawRecord:
    """Discretely observed curve of one subject."""

    times: np.ndarray
    observations: np.ndarray
    id: str = ""

    def __post_init__(self):
        times = np.array(self.times, dtype=float)
        obs = np.array(self.observations, dtype=float)
        if times.shape != obs.shape or times.ndim != 1:
            raise SmoothingError(
                f"record {self.id!r}: {times.size} times but {obs.size} observations"
            )
        if times.size and (times.min() < 0.0 or times.max() > 1.0):
            raise SmoothingError(f"record {self.id!r}: times must lie in [0,1]")
        if np.any(np.diff(times) < 0):
            raise SmoothingError(f"record {self.id!r}: times must be increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "observations", obs)

    @classmethod
    def from_curve(cls, curve: SampledCurve, id: str = "") -> "RawRecord":
        return cls(curve.grid.points, curve.values, id=id)


@dataclass(frozen=True, eq=False)
class SmoothCurve:
    """Fitted penalized B-spline."""

    knots: np.ndarray
    degree: int
    coefficients: np.ndarray
    selected_lambda: float
    gcv_score: float = float("nan")
    id: str = ""
    spline: BSpline = field(init=False, repr=False)

    def __post_init__(self):
        intervals = np.unique(self.knots).size - 1
        if self.coefficients.size != intervals + self.degree:
            raise SmoothingError(
                f"{self.coefficients.size} coefficients for {intervals} knot intervals of degree {self.degree}"
            )
        object.__setattr__(self, "spline", BSpline(self.knots, self.coefficients, self.degree))


class _PenalizedSystem:
    """Normal equations of one record, reusable across smoothing parameters."""

    def __init__(self, times: np.ndarray, obs: np.ndarray, degree: int, penalty_order: int):
        breaks = np.unique(np.concatenate([[0.0], times, [1.0]]))
        self.degree = degree
        self.knots = np.concatenate([np.repeat(breaks[0], degree), breaks, np.repeat(breaks[-1], degree)])
        n_basis = self.knots.size - degree - 1
        basis = BSpline(self.knots, np.eye(n_basis), degree, extrapolate=False)

        design = np.nan_to_num(basis(times))
        self.obs = obs
        self.n = obs.size
        self.gram = design.T @ design
        self.rhs = design.T @ obs
        self.design = design
        self.penalty = _roughness_penalty(basis, breaks, degree, penalty_order)

    def solve(self, lam: float):
        lhs = self.gram + lam * self.penalty
        factor = cho_factor(lhs, lower=True)
        return factor, cho_solve(factor, self.rhs)

    def gcv(self, lam: float) -> float:
        """Craven-Wahba score n * RSS / (n - tr H)^2."""
        try:
            factor, coef = self.solve(lam)
        except (LinAlgError, ValueError):
            return np.inf
        resid = self.obs - self.design @ coef
        trace_h = float(np.trace(cho_solve(factor, self.gram)))
        dof = self.n - trace_h
        if dof <= 1e-8 * self.n:
            return np.inf
        return self.n * float(resid @ resid) / dof**2


def _roughness_penalty(basis: BSpline, breaks: np.ndarray, degree: int, order: int) -> np.ndarray:
    """Integral of products of order-th derivatives, exact by Gauss-Legendre per knot interval."""
    n_nodes = max(degree - order + 1, 1)
    nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
    left, right = breaks[:-1], breaks[1:]
    half = (right - left) / 2
    xs = (left[:, None] + half[:, None] * (nodes[None, :] + 1)).ravel()
    ws = (half[:, None] * weights[None, :]).ravel()
    deriv = np.nan_to_num(basis.derivative(order)(xs))
    return deriv.T @ (ws[:, None] * deriv)


def _dedupe(times: np.ndarray, obs: np.ndarray):
    unique, inverse = np.unique(times, return_inverse=True)
    if unique.size == times.size:
        return times, obs
    sums = np.bincount(inverse, weights=obs)
    counts = np.bincount(inverse)
    return unique, sums / counts


def fit_smooth(
    record: RawRecord,
    degree: int = 4,
    penalty_order: int = 2,
    lam: Optional[float] = None,
    log10_min: float = -10.0,
    log10_max: float = 2.0,
    points: int = 41,
) -> SmoothCurve:
    """Fit a penalized B-spline with knots at the observation times.

    Args:
        record: Observed curve; missing values already dropped
        degree: Polynomial degree of the B-splines
        penalty_order: Derivative order in the roughness penalty
        lam: Smoothing parameter; selected by GCV when omitted
        log10_min, log10_max, points: GCV search grid

    Returns:
        SmoothCurve with the selected smoothing parameter

    Raises:
        SmoothingError: too few points, or singular normal equations
    """
    times, obs = _dedupe(record.times, record.observations)
    if times.size < degree + 2:
        raise SmoothingError(
            f"record {record.id!r}: {times.size} distinct points, need at least {degree + 2}"
        )
    system = _PenalizedSystem(times, obs, degree, penalty_order)

    if lam is None:
        search = scan_then_golden(lambda u: system.gcv(10.0**u), log10_min, log10_max, points)
        if not np.isfinite(search.best_value):
            raise SmoothingError(f"record {record.id!r}: GCV is undefined on the whole search grid")
        lam = search.best
        score = search.best_value
    else:
        if lam <= 0:
            raise SmoothingError("smoothing parameter must be positive")
        score = system.gcv(lam)

    try:
        _, coef = system.solve(lam)
    except (LinAlgError, ValueError) as e:
        raise SmoothingError(
            f"record {record.id!r}: normal equations are singular at lambda={lam:g}; try a larger lambda"
        ) from e

    return SmoothCurve(
        knots=system.knots,
        degree=degree,
        coefficients=coef,
        selected_lambda=float(lam),
        gcv_score=float(score),
        id=record.id,
    )


def eval_curve(curve: SmoothCurve, grid: TimeGrid, deriv_order: int = 0) -> SampledCurve:
    """Evaluate the spline or one of its derivatives on ``grid``."""
    if deriv_order < 0 or deriv_order > curve.degree - 1:
        raise SmoothingError(
            f"derivative order {deriv_order} not available for degree {curve.degree} (max {curve.degree - 1})"
        )
    spline = curve.spline.derivative(deriv_order) if deriv_order else curve.spline
    return SampledCurve(grid, spline(grid.points))


def smooth_curves(
    records: Sequence[RawRecord],
    grid: TimeGrid,
    deriv_order: int = 0,
    lam: Optional[float] = None,
    degree: int = 4,
    penalty_order: int = 2,
    log10_min: float = -10.0,
    log10_max: float = 2.0,
    points: int = 41,
) -> Tuple[List[SmoothCurve], List[SampledCurve]]:
    """Fit every record (in parallel) and evaluate the fits on ``grid``.

    ``log10_min``, ``log10_max`` and ``points`` set the GCV grid used when ``lam`` is omitted.

    Returns:
        Tuple of (fitted splines, sampled curves or their ``deriv_order`` derivatives)
    """
    fits = parallel_map(
        lambda r: fit_smooth(
            r,
            degree=degree,
            penalty_order=penalty_order,
            lam=lam,
            log10_min=log10_min,
            log10_max=log10_max,
            points=points,
        ),
        records,
    )
    logger.info(
        "smoothed %d curves, median lambda %.3g", len(fits), float(np.median([f.selected_lambda for f in fits]))
    )
    return fits, [eval_curve(fit, grid, deriv_order) for fit in fits]

"""Functional combined CCA with second-derivative roughness regularization."""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..geometry import SampledCurve, TangentFunction, TimeGrid, compose_amplitude_phase
from ..utils.parallel import parallel_map

logger = logging.getLogger(__name__)

EIGEN_FLOOR = 1e-12
ZERO_SLOPE = 1e-12


def second_difference_penalty(grid: TimeGrid) -> np.ndarray:
    """Matrix P with psi^T P psi ~= ||D^2 psi||^2 (squared second differences scaled by spacing)."""
    t = grid.points
    h = np.diff(t)
    k = t.size
    d2 = np.zeros((k - 2, k))
    for i in range(1, k - 1):
        hl, hr = h[i - 1], h[i]
        d2[i - 1, i - 1] = 2.0 / (hl * (hl + hr))
        d2[i - 1, i] = -2.0 / (hl * hr)
        d2[i - 1, i + 1] = 2.0 / (hr * (hl + hr))
    spacing = (h[:-1] + h[1:]) / 2
    return d2.T @ (spacing[:, None] * d2)


def _inv_sqrt(matrix: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh((matrix + matrix.T) / 2)
    vals = np.maximum(vals, EIGEN_FLOOR)
    return (vecs / np.sqrt(vals)) @ vecs.T


def _decorrelate(weights: np.ndarray, cov: np.ndarray) -> np.ndarray:
    """Gram-Schmidt under ``cov`` so later pairs' scores are uncorrelated with earlier ones."""
    out = weights.copy()
    for j in range(1, out.shape[0]):
        for _ in range(2):
            for i in range(j):
                norm_i = out[i] @ cov @ out[i]
                if norm_i > EIGEN_FLOOR:
                    out[j] = out[j] - (out[i] @ cov @ out[j]) / norm_i * out[i]
    return out


@dataclass(frozen=True, eq=False)
class CcaModel:
    """Canonical weight pairs, correlations and score regression slopes."""

    grid: TimeGrid
    weights_y: np.ndarray
    weights_x: np.ndarray
    correlations: np.ndarray
    slopes: np.ndarray
    lam: float
    mean_y: np.ndarray
    scores_y: np.ndarray
    scores_x: np.ndarray
    cv_correlation: Optional[float] = None
    cv_scan: Optional[List[Tuple[float, float]]] = None
    truncated: bool = False
    warnings: List[str] = field(default_factory=list)

    @property
    def n_pairs(self) -> int:
        return self.correlations.size

    @property
    def weight_pairs(self) -> List[Tuple[SampledCurve, TangentFunction]]:
        return [
            (SampledCurve(self.grid, wy), TangentFunction.project(self.grid, wx))
            for wy, wx in zip(self.weights_y, self.weights_x)
        ]

    def amplitude_step(self, i: int) -> float:
        """Coefficient a moving the i-th amplitude canonical score by one standard deviation."""
        wy = self.weights_y[i - 1]
        return float(np.std(self.scores_y[:, i - 1], ddof=1) / self.grid.inner(wy, wy))


class _CcaProblem:
    """Centered data and discretized operators shared by every fit on the same sample."""

    def __init__(self, Y: np.ndarray, X: np.ndarray, grid: TimeGrid, penalty: np.ndarray):
        self.grid = grid
        self.w = grid.weights
        self.mean_y = Y.mean(axis=0)
        self.mean_x = X.mean(axis=0)
        self.Yc = Y - self.mean_y
        self.Xc = X - self.mean_x
        self.penalty = penalty
        n = Y.shape[0]
        # covariance operators in quadrature form: Var <psi, y> = psi^T (W Cyy W) psi
        self.Wy = self.Yc * self.w
        self.Wx = self.Xc * self.w
        self.syy = self.Wy.T @ self.Wy / (n - 1)
        self.sxx = self.Wx.T @ self.Wx / (n - 1)
        self.syx = self.Wy.T @ self.Wx / (n - 1)

    def solve(self, lam: float, n_pairs: int):
        a = self.syy + lam * self.penalty
        b = self.sxx + lam * self.penalty
        a_is, b_is = _inv_sqrt(a), _inv_sqrt(b)
        u, s, vt = np.linalg.svd(a_is @ self.syx @ b_is)
        rank = int(np.sum(s > 1e-12 * max(s[0], 1e-300))) if s.size else 0
        rank = min(rank, self.Yc.shape[0] - 1)
        pairs = min(n_pairs, rank)
        wy = (a_is @ u[:, :pairs]).T
        wx = (b_is @ vt[:pairs].T).T

        one = np.ones(self.grid.k)
        wx = wx - (wx @ self.w)[:, None] * one[None, :]
        wy = _decorrelate(wy, self.syy)
        wx = _decorrelate(wx, self.sxx)
        for j in range(pairs):
            wy[j] /= np.sqrt(wy[j] @ a @ wy[j])
            wx[j] /= np.sqrt(wx[j] @ b @ wx[j])
        return wy, wx, pairs


def _corr(a: np.ndarray, b: np.ndarray) -> float:
    sa, sb = np.std(a), np.std(b)
    if sa == 0 or sb == 0:
        return 0.0
    return float(np.corrcoef(a, b)[0, 1])


def _loo_correlation(Y: np.ndarray, X: np.ndarray, grid: TimeGrid, penalty: np.ndarray, lam: float, reference: np.ndarray) -> float:
    """Correlation of held-out first canonical scores over leave-one-out folds."""
    n = Y.shape[0]

    def fold(i: int) -> Tuple[float, float]:
        keep = np.arange(n) != i
        problem = _CcaProblem(Y[keep], X[keep], grid, penalty)
        wy, wx, pairs = problem.solve(lam, 1)
        if pairs == 0:
            return 0.0, 0.0
        wy, wx = wy[0], wx[0]
        if grid.inner(wy, reference) < 0:
            wy, wx = -wy, -wx
        sy = grid.inner(wy, Y[i] - problem.mean_y)
        sx = grid.inner(wx, X[i] - problem.mean_x)
        return sy, sx

    held = np.array(parallel_map(fold, range(n)))
    return _corr(held[:, 0], held[:, 1])


def _fit_at(problem: _CcaProblem, lam: float, n_pairs: int):
    wy, wx, pairs = problem.solve(lam, n_pairs)
    sy = problem.Yc @ (wy * problem.w).T
    sx = problem.Xc @ (wx * problem.w).T
    rho = np.array([_corr(sy[:, j], sx[:, j]) for j in range(pairs)])
    flip = np.where(rho < 0, -1.0, 1.0)
    wx, sx, rho = wx * flip[:, None], sx * flip[None, :], rho * flip
    order = np.argsort(-rho, kind="stable")
    wy, wx, sy, sx, rho = wy[order], wx[order], sy[:, order], sx[:, order], rho[order]

    # pair sign: largest-magnitude amplitude weight entry is positive
    lead = wy[np.arange(pairs), np.argmax(np.abs(wy), axis=1)]
    sign = np.where(lead < 0, -1.0, 1.0)
    wy, wx = wy * sign[:, None], wx * sign[:, None]
    sy, sx = sy * sign[None, :], sx * sign[None, :]
    return wy, wx, sy, sx, np.clip(rho, 0.0, 1.0), pairs


def fit_cca(
    ys: Sequence[SampledCurve],
    xs: Sequence[TangentFunction],
    lam: Optional[float] = None,
    n_pairs: int = 2,
    log10_min: float = -8.0,
    log10_max: float = 0.0,
    grid_points: int = 17,
) -> CcaModel:
    """Regularized functional CCA between amplitude and phase functions.

    Args:
        ys: Amplitude functions
        xs: Phase functions
        lam: Roughness penalty weight; chosen by leave-one-out CV when omitted
        n_pairs: Number of canonical pairs requested
        log10_min, log10_max, grid_points: CV grid for lam

    Returns:
        CcaModel; ``truncated`` is set when fewer pairs than requested exist
    """
    n = len(ys)
    if n < 3:
        raise ValueError(f"fit_cca needs at least 3 samples, got {n}")
    if len(xs) != n:
        raise ValueError(f"{n} amplitude functions but {len(xs)} phase functions")
    grid = ys[0].grid
    Y = np.vstack([y.values for y in ys])
    X = np.vstack([x.values for x in xs])
    penalty = second_difference_penalty(grid)
    problem = _CcaProblem(Y, X, grid, penalty)

    cv_scan = None
    cv_correlation = None
    if lam is None:
        cv_scan = []
        for u in np.linspace(log10_min, log10_max, grid_points):
            candidate = float(10.0**u)
            wy_full = _fit_at(problem, candidate, 1)[0]
            reference = wy_full[0] if wy_full.shape[0] else np.zeros(grid.k)
            cv_scan.append((candidate, _loo_correlation(Y, X, grid, penalty, candidate, reference)))
        lam, cv_correlation = max(cv_scan, key=lambda e: e[1])
        logger.info("CV selected lambda = %.3g (validated rho = %.3f)", lam, cv_correlation)
    elif lam <= 0:
        raise ValueError("lambda must be positive")

    wy, wx, sy, sx, rho, pairs = _fit_at(problem, lam, n_pairs)
    notes = []
    truncated = pairs < n_pairs
    if truncated:
        notes.append(f"requested {n_pairs} canonical pairs, only {pairs} available")
        logger.warning(notes[-1])

    var_y = sy.var(axis=0, ddof=1)
    cov = ((sy - sy.mean(axis=0)) * (sx - sx.mean(axis=0))).sum(axis=0) / (n - 1)
    slopes = np.divide(cov, var_y, out=np.zeros_like(cov), where=var_y > 0)

    return CcaModel(
        grid=grid,
        weights_y=wy,
        weights_x=wx,
        correlations=rho,
        slopes=slopes,
        lam=float(lam),
        mean_y=problem.mean_y,
        scores_y=sy,
        scores_x=sx,
        cv_correlation=cv_correlation,
        cv_scan=cv_scan,
        truncated=truncated,
        warnings=notes,
    )


def canonical_mode(model: CcaModel, i: int, a: float, b: Optional[float] = None) -> SampledCurve:
    """(mean_y + a psi_y,i) composed with phi^-1(b psi_x,i), i is 1-based.

    Without ``b``, the coefficients follow the score regression, a / b = beta_i.

    Raises:
        ValueError: ``b`` is omitted, a != 0 and beta_i is zero
        PhaseDomainError: b psi_x,i has no warp
    """
    if not 1 <= i <= model.n_pairs:
        raise ValueError(f"pair index must be between 1 and {model.n_pairs}, got {i}")
    grid = model.grid
    wy, wx = model.weights_y[i - 1], model.weights_x[i - 1]
    if b is None:
        beta = float(model.slopes[i - 1])
        if a == 0.0:
            b = 0.0
        elif abs(beta) < ZERO_SLOPE:
            raise ValueError(f"pair {i} has zero regression slope; pass b explicitly")
        else:
            b = a / beta
    y = SampledCurve(grid, model.mean_y + a * wy)
    return compose_amplitude_phase(y, TangentFunction.project(grid, b * wx))

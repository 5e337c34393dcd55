"""Fisher-Rao alignment of a set of curves.

Curves are compared through their signed square-root slopes, under which
warping acts isometrically. Each curve is warped to a template by dynamic
programming; the template is the Karcher mean of the aligned slopes; finally
the warps are centered so the sample phase functions sum to zero.
"""

import logging
from dataclasses import dataclass, field
from math import gcd
from typing import List, Sequence

import numba as nb
import numpy as np

from ..errors import ConvergenceError
from ..geometry import (
    SampledCurve,
    SphereFunction,
    SrvfPoint,
    TangentFunction,
    TimeGrid,
    WarpingFunction,
    geodesic_distance,
    invert_warp,
    karcher_mean_sphere,
    phi,
    phi_inverse,
    srvf_of_warp,
    warp_curve,
    warp_of_srvf,
)
from ..geometry.fungeom import compose_warps
from ..geometry.types import GridFunction, check_same_grid
from ..utils.parallel import parallel_map

logger = logging.getLogger(__name__)

MAX_STEP = 5
STEPS = np.array(
    [(i, j) for i in range(1, MAX_STEP + 1) for j in range(1, MAX_STEP + 1) if gcd(i, j) == 1],
    dtype=np.int64,
)


@dataclass(frozen=True, eq=False)
class AlignmentResult:
    """Aligned amplitudes, warps and centered phase functions."""

    aligned: List[SampledCurve]
    warps: List[WarpingFunction]
    phases: List[TangentFunction]
    template: SphereFunction
    iterations: int
    converged: bool = True
    template_scale: float = 1.0
    warnings: List[str] = field(default_factory=list)

    @property
    def grid(self) -> TimeGrid:
        return self.template.grid


def curve_srvf(f: GridFunction) -> SampledCurve:
    """sign(f') * sqrt(|f'|), not normalized. Slopes at rounding level count as zero."""
    slope = np.gradient(f.values, f.grid.points)
    noise = 64.0 * np.finfo(float).eps * max(float(np.abs(f.values).max()), 1.0) / float(np.diff(f.grid.points).min())
    slope[np.abs(slope) <= noise] = 0.0
    return SampledCurve(f.grid, np.sign(slope) * np.sqrt(np.abs(slope)))


def warp_srvf(q: GridFunction, gamma: WarpingFunction) -> SampledCurve:
    """Group action (q o gamma) * sqrt(gamma') on an SRVF."""
    check_same_grid(q, gamma)
    t = q.grid.points
    slope = np.clip(np.gradient(gamma.values, t), 0.0, None)
    return SampledCurve(q.grid, np.interp(gamma.values, t, q.values) * np.sqrt(slope))


@nb.njit(nogil=True, cache=False)
def _edge_cost(t, q1, q2, k0, l0, k1, l1):
    # integrand (q1 - q2(gamma) sqrt(slope))^2 at the reference nodes k0..k1, trapezoid
    slope = (t[l1] - t[l0]) / (t[k1] - t[k0])
    root = np.sqrt(slope)
    total = 0.0
    prev = 0.0
    j = l0
    for r in range(k0, k1 + 1):
        g = t[l0] + slope * (t[r] - t[k0])
        while j < l1 and t[j + 1] < g:
            j += 1
        if j >= l1:
            q2g = q2[l1]
        else:
            w = (g - t[j]) / (t[j + 1] - t[j])
            q2g = (1.0 - w) * q2[j] + w * q2[j + 1]
        diff = q1[r] - q2g * root
        cur = diff * diff
        if r > k0:
            total += 0.5 * (cur + prev) * (t[r] - t[r - 1])
        prev = cur
    return total


@nb.njit(nogil=True, cache=False)
def _dp_path(t, q1, q2, steps):
    k = t.size
    cost = np.full((k, k), np.inf)
    back_i = np.full((k, k), -1, dtype=np.int64)
    back_j = np.full((k, k), -1, dtype=np.int64)
    cost[0, 0] = 0.0
    for i in range(1, k):
        for j in range(1, k):
            best = np.inf
            bi = -1
            bj = -1
            for s in range(steps.shape[0]):
                a = i - steps[s, 0]
                b = j - steps[s, 1]
                if a < 0 or b < 0:
                    continue
                base = cost[a, b]
                if base == np.inf:
                    continue
                c = base + _edge_cost(t, q1, q2, a, b, i, j)
                if c < best:
                    best = c
                    bi = a
                    bj = b
            cost[i, j] = best
            back_i[i, j] = bi
            back_j[i, j] = bj

    path_i = np.empty(k, dtype=np.int64)
    path_j = np.empty(k, dtype=np.int64)
    n = 0
    i = k - 1
    j = k - 1
    while i > 0 or j > 0:
        path_i[n] = i
        path_j[n] = j
        n += 1
        ni = back_i[i, j]
        nj = back_j[i, j]
        i = ni
        j = nj
    path_i[n] = 0
    path_j[n] = 0
    n += 1
    return path_i[:n][::-1].copy(), path_j[:n][::-1].copy(), cost[k - 1, k - 1]


def pairwise_optimal_warp(q_ref: GridFunction, q_mov: GridFunction) -> WarpingFunction:
    """Warp gamma minimizing ||q_ref - (q_mov o gamma) sqrt(gamma')||.

    Piecewise linear on the lattice of grid nodes with slopes p/q, 1 <= p, q <= 5.
    """
    check_same_grid(q_ref, q_mov)
    t = np.ascontiguousarray(q_ref.grid.points)
    path_i, path_j, _ = _dp_path(
        t,
        np.ascontiguousarray(q_ref.values, dtype=np.float64),
        np.ascontiguousarray(q_mov.values, dtype=np.float64),
        STEPS,
    )
    gamma = np.interp(t, t[path_i], t[path_j])
    gamma[0], gamma[-1] = 0.0, 1.0
    return WarpingFunction(q_ref.grid, gamma)


def _normalized_template(grid: TimeGrid, srvfs: np.ndarray, tol: float, max_iter: int, notes: List[str]):
    """Karcher mean of the normalized SRVFs, with the mean norm as scale."""
    norms = np.array([grid.norm(q) for q in srvfs])
    if np.any(norms < 1e-12):
        mean = srvfs.mean(axis=0)
        scale = grid.norm(mean)
        if scale < 1e-12:
            return SphereFunction.constant_one(grid), 0.0
        return SphereFunction(grid, mean / scale), scale
    units = [SphereFunction(grid, q / n) for q, n in zip(srvfs, norms)]
    try:
        mean = karcher_mean_sphere(units, tol=tol, max_iter=max_iter)
    except ConvergenceError as e:
        notes.append(str(e))
        logger.warning("template update: %s", e)
        mean = e.estimate
    return mean, float(norms.mean())


def _center(curves: Sequence[SampledCurve], warps: List[WarpingFunction], karcher_tol: float, karcher_max_iter: int):
    """Two-stage centering: Karcher-mean warp to identity, then exact tangent re-centering."""
    grid = curves[0].grid
    srvfs = [srvf_of_warp(g) for g in warps]
    try:
        mean_srvf = karcher_mean_sphere(srvfs, tol=karcher_tol, max_iter=karcher_max_iter)
    except ConvergenceError as e:
        logger.warning("warp centering: %s", e)
        mean_srvf = e.estimate
    mean_warp_inv = invert_warp(warp_of_srvf(SrvfPoint(grid, mean_srvf.values)))
    warps = [compose_warps(g, mean_warp_inv) for g in warps]

    raw = np.vstack([phi(g).values for g in warps])
    centered = raw - raw.mean(axis=0)
    phases = [TangentFunction(grid, row) for row in centered]
    warps = [phi_inverse(x) for x in phases]
    aligned = [warp_curve(f, invert_warp(g)) for f, g in zip(curves, warps)]
    return aligned, warps, phases


def align_set(
    curves: Sequence[SampledCurve],
    tol: float = 1e-4,
    max_iter: int = 20,
    karcher_tol: float = 1e-9,
    karcher_max_iter: int = 100,
) -> AlignmentResult:
    """Align curves to an iterated Karcher-mean template and center their phases.

    Args:
        curves: Smoothed curves on one grid
        tol: Stop when the template moves less than this (geodesic distance)
        max_iter: Template iterations cap
        karcher_tol, karcher_max_iter: Inner Karcher-mean settings

    Returns:
        AlignmentResult; ``converged`` is False (with a warning) when ``max_iter`` is hit
    """
    if len(curves) < 2:
        raise ValueError("align_set needs at least two curves")
    grid = curves[0].grid
    for f in curves[1:]:
        check_same_grid(curves[0], f)

    notes: List[str] = []
    qs = [curve_srvf(f) for f in curves]
    mean_curve = SampledCurve(grid, np.mean([f.values for f in curves], axis=0))
    template_q = curve_srvf(mean_curve)
    template, scale = _normalized_template(grid, template_q.values[None, :], karcher_tol, karcher_max_iter, notes)

    converged = False
    iterations = 0
    warps: List[WarpingFunction] = []
    for iterations in range(1, max_iter + 1):
        target = SampledCurve(grid, template.values * scale)
        warps = parallel_map(lambda q: pairwise_optimal_warp(target, q), qs)
        warped = np.vstack([warp_srvf(q, g).values for q, g in zip(qs, warps)])
        new_template, scale = _normalized_template(grid, warped, karcher_tol, karcher_max_iter, notes)
        movement = geodesic_distance(template, new_template)
        template = new_template
        logger.debug("alignment iteration %d: template moved %.3g", iterations, movement)
        if movement < tol:
            converged = True
            break

    if not converged:
        message = f"alignment did not converge in {max_iter} iterations"
        notes.append(message)
        logger.warning(message)

    # gamma* aligns f o gamma* to the template, so the model warp is its inverse
    model_warps = [invert_warp(g) for g in warps]
    aligned, centered_warps, phases = _center(curves, model_warps, karcher_tol, karcher_max_iter)
    logger.info("aligned %d curves in %d iterations", len(curves), iterations)
    return AlignmentResult(
        aligned=aligned,
        warps=centered_warps,
        phases=phases,
        template=template,
        iterations=iterations,
        converged=converged,
        template_scale=scale,
        warnings=notes,
    )

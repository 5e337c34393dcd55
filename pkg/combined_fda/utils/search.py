"""One-dimensional minimization on a log10 scale: coarse scan, then golden section."""

from dataclasses import dataclass
from typing import Callable, Iterable, List, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

MapFn = Callable[[Callable[[float], float], Iterable[float]], Iterable[float]]


@dataclass(frozen=True)
class LogSearchResult:
    best_log10: float
    best_value: float
    scan_log10: np.ndarray
    scan_values: np.ndarray
    evaluations: List[Tuple[float, float]]

    @property
    def best(self) -> float:
        return float(10.0**self.best_log10)

    @property
    def relative_scan_range(self) -> float:
        finite = self.scan_values[np.isfinite(self.scan_values)]
        if finite.size == 0:
            return 0.0
        top = float(np.max(np.abs(finite)))
        if top == 0.0:
            return 0.0
        return float((finite.max() - finite.min()) / top)


def scan_then_golden(
    objective: Callable[[float], float],
    log10_min: float,
    log10_max: float,
    points: int,
    xtol: float = 1e-3,
    map_fn: MapFn = map,
) -> LogSearchResult:
    """Minimize ``objective(log10_value)`` over [log10_min, log10_max].

    The scan locates the grid minimum; golden section then refines inside the
    two neighbouring cells when they bracket it. The returned point is the best
    of every evaluation, so it never scores worse than the scan minimum.
    """
    grid = np.linspace(log10_min, log10_max, points)
    values = np.array([float(v) for v in map_fn(objective, grid)], dtype=float)
    values[~np.isfinite(values)] = np.inf
    evaluations = [(float(g), float(v)) for g, v in zip(grid, values)]

    i = int(np.argmin(values))
    if 0 < i < points - 1 and values[i] < values[i - 1] and values[i] < values[i + 1]:

        def recorded(u: float) -> float:
            value = float(objective(u))
            if not np.isfinite(value):
                value = np.inf
            evaluations.append((float(u), value))
            return value

        minimize_scalar(
            recorded,
            bracket=(grid[i - 1], grid[i], grid[i + 1]),
            method="golden",
            options={"xtol": xtol},
        )

    best_log10, best_value = min(evaluations, key=lambda e: e[1])
    return LogSearchResult(
        best_log10=best_log10,
        best_value=best_value,
        scan_log10=grid,
        scan_values=values,
        evaluations=evaluations,
    )

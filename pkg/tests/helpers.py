"""Test curves and warps."""

import numpy as np

from combined_fda.geometry import TimeGrid, WarpingFunction


def exp_warp(grid: TimeGrid, a: float = 1.5) -> WarpingFunction:
    """Smooth warp (e^{at} - 1) / (e^a - 1)."""
    values = np.expm1(a * grid.points) / np.expm1(a)
    values[0], values[-1] = 0.0, 1.0
    return WarpingFunction(grid, values)


def sine_warp(grid: TimeGrid) -> WarpingFunction:
    """t + 0.1 sin(2 pi t) t (1 - t)."""
    t = grid.points
    values = t + 0.1 * np.sin(2 * np.pi * t) * t * (1 - t)
    values[0], values[-1] = 0.0, 1.0
    return WarpingFunction(grid, values)


def bumps(t: np.ndarray) -> np.ndarray:
    return np.exp(-((t - 0.3) ** 2) / 0.01) + 0.7 * np.exp(-((t - 0.7) ** 2) / 0.01)

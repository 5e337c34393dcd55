"""Evaluation grid on [0,1] with trapezoid quadrature."""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid

from ..errors import GridValidationError


def trapezoid_weights(points: np.ndarray) -> np.ndarray:
    """Quadrature weights w such that sum(w * f) is the trapezoid integral of f."""
    spacing = np.diff(points)
    weights = np.zeros_like(points)
    weights[:-1] += spacing / 2
    weights[1:] += spacing / 2
    return weights


@dataclass(frozen=True, eq=False)
class TimeGrid:
    """Strictly increasing grid on [0,1] with pinned endpoints."""

    points: np.ndarray
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 3:
            raise GridValidationError(f"time grid needs at least 3 points, got {pts.size}")
        if pts[0] != 0.0:
            raise GridValidationError("time grid must start at 0", index=0)
        if pts[-1] != 1.0:
            raise GridValidationError("time grid must end at 1", index=pts.size - 1)
        bad = np.flatnonzero(np.diff(pts) <= 0)
        if bad.size:
            raise GridValidationError("time grid is not strictly increasing", index=int(bad[0]) + 1)
        pts.setflags(write=False)
        weights = trapezoid_weights(pts)
        weights.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, k: int) -> "TimeGrid":
        """Uniform grid with k points."""
        return cls(np.linspace(0.0, 1.0, k))

    @property
    def k(self) -> int:
        return self.points.size

    @property
    def is_uniform(self) -> bool:
        spacing = np.diff(self.points)
        return bool(np.allclose(spacing, spacing[0], rtol=1e-9, atol=0.0))

    def matches(self, other: "TimeGrid") -> bool:
        return self is other or np.array_equal(self.points, other.points)

    def inner(self, a: np.ndarray, b: np.ndarray) -> float:
        return float(np.dot(self.weights, np.asarray(a) * np.asarray(b)))

    def norm(self, a: np.ndarray) -> float:
        return float(np.sqrt(max(self.inner(a, a), 0.0)))

    def integral(self, a: np.ndarray) -> float:
        return float(np.dot(self.weights, a))

    def cumulative(self, a: np.ndarray) -> np.ndarray:
        """Cumulative trapezoid integral starting at 0."""
        return cumulative_trapezoid(a, self.points, initial=0.0)

    def glued_weights(self) -> np.ndarray:
        """Quadrature weights on the glued domain [0,2] (amplitude block, then phase block)."""
        return np.concatenate([self.weights, self.weights])

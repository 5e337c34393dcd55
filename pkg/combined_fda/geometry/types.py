"""Immutable grid-sampled functions used throughout the package."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import GridValidationError
from .grid import TimeGrid

UNIT_NORM_TOL = 1e-8
ORTHOGONALITY_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Values of a function on a shared TimeGrid."""

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != (self.grid.k,):
            raise GridValidationError(
                f"{type(self).__name__} has {vals.size} values for a grid of {self.grid.k} points"
            )
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        self._validate()

    def _validate(self) -> None:
        pass

    @property
    def norm(self) -> float:
        return self.grid.norm(self.values)

    def inner(self, other: "GridFunction") -> float:
        check_same_grid(self, other)
        return self.grid.inner(self.values, other.values)


def check_same_grid(a: GridFunction, b: GridFunction) -> None:
    if not a.grid.matches(b.grid):
        raise GridValidationError("grid functions live on different grids")


class SampledCurve(GridFunction):
    """A curve on [0,1]: observed f, amplitude y, or an eigenfunction half."""


class WarpingFunction(GridFunction):
    """Orientation-preserving warp of [0,1]: strictly increasing, gamma(0)=0, gamma(1)=1."""

    def _validate(self) -> None:
        vals = self.values
        if vals[0] != 0.0:
            raise GridValidationError("warping function must start at 0", index=0)
        if vals[-1] != 1.0:
            raise GridValidationError("warping function must end at 1", index=vals.size - 1)
        bad = np.flatnonzero(np.diff(vals) <= 0)
        if bad.size:
            raise GridValidationError("warping function is not strictly increasing", index=int(bad[0]) + 1)

    @classmethod
    def identity(cls, grid: TimeGrid) -> "WarpingFunction":
        return cls(grid, grid.points)


class SphereFunction(GridFunction):
    """Point on the unit L2 sphere of functions on [0,1]."""

    def _validate(self) -> None:
        norm = self.grid.norm(self.values)
        if abs(norm - 1.0) > UNIT_NORM_TOL:
            raise GridValidationError(f"expected unit norm, got {norm:.12g}")

    @classmethod
    def normalized(cls, grid: TimeGrid, values: np.ndarray):
        values = np.asarray(values, dtype=float)
        norm = grid.norm(values)
        if norm == 0.0:
            raise GridValidationError("cannot normalize the zero function")
        return cls(grid, values / norm)

    @classmethod
    def constant_one(cls, grid: TimeGrid) -> "SphereFunction":
        """The base point mu = 1 of the phase tangent space."""
        return cls(grid, np.ones(grid.k))


class SrvfPoint(SphereFunction):
    """Square-root slope of a warping function: unit norm and positive on the interior."""

    def _validate(self) -> None:
        super()._validate()
        interior = self.values[1:-1]
        bad = np.flatnonzero(interior <= 0)
        if bad.size:
            raise GridValidationError("SRVF of a warp must be positive on the interior", index=int(bad[0]) + 1)
        if self.values[0] < 0 or self.values[-1] < 0:
            raise GridValidationError("SRVF of a warp must be nonnegative at the endpoints")


@dataclass(frozen=True, eq=False)
class TangentFunction(GridFunction):
    """Element of the tangent space of the sphere at ``base`` (default: the constant 1)."""

    base: Optional[SphereFunction] = None

    def _validate(self) -> None:
        base = self.base_values
        overlap = self.grid.inner(self.values, base)
        scale = max(1.0, self.grid.norm(self.values))
        if abs(overlap) > ORTHOGONALITY_TOL * scale:
            raise GridValidationError(f"tangent function is not orthogonal to its base point ({overlap:.3g})")

    @property
    def base_values(self) -> np.ndarray:
        if self.base is None:
            return np.ones(self.grid.k)
        check_same_grid(self, self.base)
        return self.base.values

    @classmethod
    def zero(cls, grid: TimeGrid, base: Optional[SphereFunction] = None) -> "TangentFunction":
        return cls(grid, np.zeros(grid.k), base=base)

    @classmethod
    def project(
        cls, grid: TimeGrid, values: np.ndarray, base: Optional[SphereFunction] = None
    ) -> "TangentFunction":
        """Remove the component along the base point, then wrap."""
        values = np.asarray(values, dtype=float)
        mu = np.ones(grid.k) if base is None else base.values
        return cls(grid, values - grid.inner(values, mu) * mu, base=base)

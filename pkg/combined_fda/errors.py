"""Exception hierarchy shared by every module."""

from typing import Optional


class CombinedFdaError(Exception):
    """Base class for domain errors raised by the package."""


class GridValidationError(CombinedFdaError, ValueError):
    """A grid or grid function violates its invariants."""

    def __init__(self, message: str, index: Optional[int] = None):
        if index is not None:
            message = f"{message} (first violation at index {index})"
        super().__init__(message)
        self.index = index


class GeodesicDomainError(CombinedFdaError, ValueError):
    """Log map requested outside the open hemisphere around the base point."""

    def __init__(self, distance: float):
        super().__init__(f"geodesic distance {distance:.6g} is outside the log-map domain (< pi/2)")
        self.distance = distance


class PhaseDomainError(CombinedFdaError, ValueError):
    """Exp of a phase function is not positive, so no warping function corresponds to it."""

    def __init__(
        self,
        min_value: float,
        sample: Optional[int] = None,
        m: Optional[int] = None,
        z: Optional[float] = None,
    ):
        context = []
        if sample is not None:
            context.append(f"sample={sample}")
        if m is not None:
            context.append(f"m={m}")
        if z is not None:
            context.append(f"z={z:g}")
        suffix = f" [{', '.join(context)}]" if context else ""
        super().__init__(
            f"phase function outside the domain of phi^-1: min Exp value {min_value:.6g}{suffix}"
        )
        self.min_value = min_value
        self.sample = sample
        self.m = m
        self.z = z

    def with_context(
        self, sample: Optional[int] = None, m: Optional[int] = None, z: Optional[float] = None
    ) -> "PhaseDomainError":
        """Copy of this error with caller context attached."""
        return PhaseDomainError(
            self.min_value,
            sample=self.sample if sample is None else sample,
            m=self.m if m is None else m,
            z=self.z if z is None else z,
        )


class ConvergenceError(CombinedFdaError, RuntimeError):
    """An iterative mean did not reach its tolerance."""

    def __init__(self, message: str, final_norm: float, estimate=None):
        super().__init__(f"{message} (final tangent-mean norm {final_norm:.3g})")
        self.final_norm = final_norm
        self.estimate = estimate


class SmoothingError(CombinedFdaError, ValueError):
    """Penalized spline fit cannot be computed."""


class IngestError(CombinedFdaError, ValueError):
    """Malformed curve CSV."""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[int] = None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.row = row
        self.column = column

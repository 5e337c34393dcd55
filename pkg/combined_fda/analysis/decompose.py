"""Smoothing followed by alignment: the amplitude/phase split every analysis starts from."""

from typing import Any, Dict, List, Optional, Sequence, Tuple

from ..data.smooth import RawRecord, SmoothCurve, smooth_curves
from ..geometry import SampledCurve, TimeGrid
from .align import AlignmentResult, align_set


def decompose_records(
    records: Sequence[RawRecord],
    grid: TimeGrid,
    deriv_order: int = 0,
    smoothing_lambda: Optional[float] = None,
    smoothing: Optional[Dict[str, Any]] = None,
    **align_kwargs,
) -> Tuple[AlignmentResult, List[SampledCurve], List[SmoothCurve]]:
    """Smooth every record on ``grid`` and align the smoothed curves.

    Args:
        records: Observed curves
        grid: Evaluation grid
        deriv_order: Analyze this derivative of the smoothed curves
        smoothing_lambda: Fixed smoothing parameter; GCV when omitted
        smoothing: Extra ``smooth_curves`` options (degree, penalty_order, GCV grid)
        **align_kwargs: Passed to ``align_set``

    Returns:
        Tuple of (alignment, smoothed curves f_hat, spline fits)
    """
    fits, smoothed = smooth_curves(
        records, grid, deriv_order=deriv_order, lam=smoothing_lambda, **(smoothing or {})
    )
    return align_set(smoothed, **align_kwargs), smoothed, fits

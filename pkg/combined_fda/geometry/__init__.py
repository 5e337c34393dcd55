"""Grid functions and the sphere geometry of warping functions."""

from .grid import TimeGrid
from .types import (
    GridFunction,
    SampledCurve,
    SphereFunction,
    SrvfPoint,
    TangentFunction,
    WarpingFunction,
)
from .fungeom import (
    compose_amplitude_phase,
    compose_warps,
    exp_map,
    geodesic_distance,
    invert_warp,
    karcher_mean_sphere,
    log_map,
    phi,
    phi_inverse,
    srvf_of_warp,
    warp_curve,
    warp_of_srvf,
)

__all__ = [
    "TimeGrid",
    "GridFunction",
    "SampledCurve",
    "SphereFunction",
    "SrvfPoint",
    "TangentFunction",
    "WarpingFunction",
    "compose_amplitude_phase",
    "compose_warps",
    "exp_map",
    "geodesic_distance",
    "invert_warp",
    "karcher_mean_sphere",
    "log_map",
    "phi",
    "phi_inverse",
    "srvf_of_warp",
    "warp_curve",
    "warp_of_srvf",
]

"""Harmonic functions on rotationally symmetric cones.

Radial modes, Liouville-type growth bounds, doubling and curvature
diagnostics, harmonic extension on surfaces and p-Laplacian barriers.
"""

__version__ = "0.1.0"

from .geometry import ConeSpec, ball_volume, doubling_ratios, radial_curvature, total_curvature_2d
from .modes import RadialMode, GrowthFit, fit_growth, indicial_exponent, integrate_mode
from .warp import WarpFn, builtin_catalog, eval_warp, get_warp, validate_warp, warp_from_expr

__all__ = [
    "ConeSpec", "ball_volume", "doubling_ratios", "radial_curvature", "total_curvature_2d",
    "RadialMode", "GrowthFit", "fit_growth", "indicial_exponent", "integrate_mode",
    "WarpFn", "builtin_catalog", "eval_warp", "get_warp", "validate_warp", "warp_from_expr",
]

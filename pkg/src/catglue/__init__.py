"""catglue: glue planar domains along boundary arcs and audit CAT(0) thinness."""

from .curves import (
    BoundaryCurve,
    CurvatureProfile,
    build_from_curvature_profile,
    circular_arc,
    straight_segment,
)

__all__ = [
    "BoundaryCurve",
    "CurvatureProfile",
    "build_from_curvature_profile",
    "circular_arc",
    "straight_segment",
]

__version__ = "0.1.0"

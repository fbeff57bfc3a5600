"""Center-outward quantile contours on spheres, tori, and their products.

The heavy lifting happens in the compiled extension `manifoldq._core`;
this package re-exports its public surface.
"""

from ._core import (  # noqa: F401
    CutLocusError,
    EmptyWindowError,
    ambient_dim,
    extract_contour,
    fit_quantiles,
    frechet_mean,
    geodesic_distance,
    latitude_profile,
    manifold_dim,
    preset_manifold,
    preset_names,
    sample_preset,
    solve_assignment,
    uniform_sample,
)

__all__ = [
    "CutLocusError",
    "EmptyWindowError",
    "ambient_dim",
    "extract_contour",
    "fit_quantiles",
    "frechet_mean",
    "geodesic_distance",
    "latitude_profile",
    "manifold_dim",
    "preset_manifold",
    "preset_names",
    "sample_preset",
    "solve_assignment",
    "uniform_sample",
]

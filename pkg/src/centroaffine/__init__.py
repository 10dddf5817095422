"""Centro-affine invariants of smooth convex bodies in the plane and in space.

Bodies are given by support functions on the circle or the 2-sphere.  The
package evaluates curvature fields spectrally, integrates the p-affine
surface areas and related invariants, and checks the inequalities and
limit theorems that relate them.
"""

from .body import (Body, BodyValidationError, FieldTable, curvature_extrema, evaluate_fields,
                   linear_image, make_ellipsoid, make_fourier, make_sphharm, translate)
from .geometry import (aleksandrov_body, centroid, mixed_curvature, mixed_input, mixed_integral,
                       polar_body, polar_volume, radial_function, surface_area, volume)
from .invariants import (affine_isoperimetric_ratio, entropy_omega_K, kl_divergence, lambda_K,
                         limit_sequence, omega_2n, omega_p)
from .sphere import Grid, build_grid, differentiate, integrate

__version__ = "0.1.0"

__all__ = [
    "Body", "BodyValidationError", "FieldTable", "Grid",
    "build_grid", "integrate", "differentiate",
    "make_ellipsoid", "make_fourier", "make_sphharm", "linear_image", "translate",
    "evaluate_fields", "curvature_extrema",
    "volume", "polar_volume", "surface_area", "centroid", "mixed_curvature", "mixed_input",
    "mixed_integral", "polar_body", "radial_function", "aleksandrov_body",
    "omega_p", "affine_isoperimetric_ratio", "omega_2n", "entropy_omega_K", "kl_divergence",
    "lambda_K", "limit_sequence",
]

"""f-divergences of convex bodies with respect to their cone measures."""

from .body import (
    BoundaryPoint,
    ClippedBody2D,
    ConvexBody,
    Ellipsoid,
    Polytope,
    RoundedPolygon,
    SmoothBody2D,
)
from .divergence import (
    DivergenceResult,
    f_divergence,
    hellinger,
    kl_divergence,
    lp_asa,
    lpsi_asa,
    mixed_divergence,
    renyi,
)
from .generator import Generator, adjoint, kl, kl_reverse, linear, power, parse_generator
from .measure import cone_measure, densities, total_mass
from .surface_body import (
    divergence_via_limit,
    limit_estimate,
    surface_body,
    volume_deficit,
    weight_for_divergence,
)
from .verify import check_bounds, check_gl_invariance, check_valuation

__version__ = "0.1.0"

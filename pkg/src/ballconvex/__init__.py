"""Numerical geometry of R-ball convex bodies.

Principal entry points: ball-convex hulls (:func:`r_ball_hull`), R-ball
floating bodies (:func:`floating_body`), the relative affine surface area
(:func:`relative_affine_surface_area`) and the deficit-limit experiment
(:func:`verify_limit`).
"""
__version__ = "0.1.0"

from .affine import (CapSpec, ellipsoid_cap_volume_asymptotic, ellipsoid_cap_volume_exact,
                     ellipsoid_cap_volume_quadrature, isoperimetric_bound, limit_constant,
                     pointwise_deficit_rate, relative_affine_surface_area,
                     relative_affine_surface_area_L, sphere_reciprocal_quadratic_integral,
                     sphere_reciprocal_quadratic_mc, sphere_reciprocal_quadratic_quadrature)
from .ballpoly import BallPolyhedron
from .bodyspec import body_from_dict, body_to_dict, load_body
from .errors import (DivergentIntegralError, EmptyBodyError, GeometryError, HullInfeasibleError,
                     InfeasibleCutError, InvalidInputError, NotLConvexError, NotRBallConvexError,
                     NumericDomainError, PreconditionError, ReportIOError)
from .experiments import (PropertyReport, RatioSeries, emit_report, run_property_suite,
                          verify_limit)
from .floating import (CutBall, FloatParams, FloatingBody, convolution_body, cross_variogram,
                       cut_volume, exact_cut_ball, floating_body, radial_volume_difference,
                       scaling_covariance_check, volume_deficit)
from .geometry import Ball, ConvexBodyOracle, Ellipsoid, make_ball, make_ellipsoid
from .hull import hausdorff_distance, is_r_ball_convex, min_curvature, r_ball_hull
from .quadrature import SphereGrid, sphere_grid, surface_integral
from .rng import MCConfig

"""Quasihyperbolic and distance-ratio geometry of domains in finite-dimensional normed planes."""

from ._validation import DisconnectedError, InputError, PreconditionError
from .balls import (
    BallTrace,
    CheckReport,
    Violation,
    Witness,
    convexity_check,
    find_nonconvex_witness,
    first_crossing_along_ray,
    starlike_check,
    trace_ball,
)
from .domains import ConvexPolytope, HalfSpace, Polygon, PuncturedSpace, boundary_distance, rectangle_union
from .estimators import QuasihyperbolicDistance, QuasihyperbolicField
from .geodesic import BallConstraint, DistanceEstimate, DistanceField, SolverParams, qh_distance
from .norms import NormSpec, dual_exponent, modulus_of_convexity_estimate, modulus_of_smoothness_estimate, norm
from .paths import MetricKind, Polyline, average_path, j_distance, qh_polyline_length, qh_segment_length

__version__ = "0.1.0"

__all__ = [
    "BallConstraint",
    "BallTrace",
    "CheckReport",
    "ConvexPolytope",
    "DisconnectedError",
    "DistanceEstimate",
    "DistanceField",
    "HalfSpace",
    "InputError",
    "MetricKind",
    "NormSpec",
    "Polygon",
    "Polyline",
    "PreconditionError",
    "PuncturedSpace",
    "QuasihyperbolicDistance",
    "QuasihyperbolicField",
    "SolverParams",
    "Violation",
    "Witness",
    "average_path",
    "boundary_distance",
    "convexity_check",
    "dual_exponent",
    "find_nonconvex_witness",
    "first_crossing_along_ray",
    "j_distance",
    "modulus_of_convexity_estimate",
    "modulus_of_smoothness_estimate",
    "norm",
    "qh_distance",
    "qh_polyline_length",
    "qh_segment_length",
    "rectangle_union",
    "starlike_check",
    "trace_ball",
]

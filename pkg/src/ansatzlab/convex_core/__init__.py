"""Convex-function kernel: representations, polytopes, envelopes,
perspective powers, mollification and sampling checks."""

from .functions import (
    SmoothConvexBase, Piece, PiecewiseConvexMax, eval_max, active_pieces,
    subgradient_polytope, identity_base, affine_base, quadratic_base,
    positive_power_base, logsumexp_base, base_from_spec, fd_gradient, fd_hessian,
)
from .polytope import SubgradientPolytope, polytope_volume, exact_simplex_volume, affine_hull_basis
from .envelope import EnvelopeFunction, lower_convex_envelope
from .perspective import perspective_power
from .mollify import BumpKernel, MollifiedFunction, mollify
from .checks import ConvexityReport, C1Report, check_convexity, check_c1_across, box_sampler

__all__ = [
    "SmoothConvexBase", "Piece", "PiecewiseConvexMax", "eval_max", "active_pieces",
    "subgradient_polytope", "identity_base", "affine_base", "quadratic_base",
    "positive_power_base", "logsumexp_base", "base_from_spec", "fd_gradient", "fd_hessian",
    "SubgradientPolytope", "polytope_volume", "exact_simplex_volume", "affine_hull_basis",
    "EnvelopeFunction", "lower_convex_envelope", "perspective_power",
    "BumpKernel", "MollifiedFunction", "mollify",
    "ConvexityReport", "C1Report", "check_convexity", "check_c1_across", "box_sampler",
]

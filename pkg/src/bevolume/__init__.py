"""Numerical verification of weighted volume comparison on rotationally symmetric manifolds."""

from .catalog import CATALOG, make_manifold, parse_manifold_spec
from .checks import CHECKS
from .constants import ExplicitConstants, explicit_constants, gradient_free_constants
from .model_space import ModelSpace, alpha, check_alpha_monotone
from .radial_manifold import RadialManifold, RadialProfile
from .report import CheckReport, Tolerance

__version__ = "0.1.0"

__all__ = [
    "CATALOG",
    "CHECKS",
    "CheckReport",
    "ExplicitConstants",
    "ModelSpace",
    "RadialManifold",
    "RadialProfile",
    "Tolerance",
    "alpha",
    "check_alpha_monotone",
    "explicit_constants",
    "gradient_free_constants",
    "make_manifold",
    "parse_manifold_spec",
]

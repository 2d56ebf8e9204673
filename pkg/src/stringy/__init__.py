"""Leading terms of stringy integrals, computed four independent ways.

The exact routes (regular triangulations of the Cayley configuration and
the dual-polytope volume) return rationals; the numeric routes (critical
points of the log-likelihood and direct quadrature) return floats that
are checked against them.
"""
from .cayley import assemble_delta, build_cayley, repair_problem, saturation_repair
from .critpoints import LogLikelihood, k0_pairing, solve_critical, stationary_sum, toric_hessian
from .dual_volume import amplitude, amplitude_dual_volume, amplitude_triangulation, dual_cone_volume
from .errors import InputError, StringyError, VerificationError
from .laurent import LaurentPoly
from .polytope import Polytope, dual_polytope, newton_polytope, normalized_volume, weighted_minkowski
from .triangulate import Configuration, Triangulation, random_regular_triangulation, regular_triangulation

__all__ = [
    "Configuration",
    "InputError",
    "LaurentPoly",
    "LogLikelihood",
    "Polytope",
    "StringyError",
    "Triangulation",
    "VerificationError",
    "amplitude",
    "amplitude_dual_volume",
    "amplitude_triangulation",
    "assemble_delta",
    "build_cayley",
    "dual_cone_volume",
    "dual_polytope",
    "k0_pairing",
    "newton_polytope",
    "normalized_volume",
    "random_regular_triangulation",
    "regular_triangulation",
    "repair_problem",
    "saturation_repair",
    "solve_critical",
    "stationary_sum",
    "toric_hessian",
    "weighted_minkowski",
]

"""Exact mould calculus for normal forms of perturbed linear dynamics.

The package solves the mould equation of a homogeneous perturbation
problem over Gaussian rationals and contracts the solution against
comoulds in a concrete filtered Lie algebra to produce a truncated normal
form ``Z_m`` and generator ``Y_m``.
"""

from .errors import MouldError
from .liecore import (HomogeneousProblem, NormalFormResult, bch, exp_ad, lie_contraction,
                      normal_form, tilde_solution, verify_normal_form)
from .moulds import (Mould, delta_coproduct, is_alternal, is_symmetral, mould_exp, mould_inverse,
                     mould_log, mould_mul, shuffle_coefficient)
from .scalars import FrequencyModel, Scalar, build_frequency_model
from .solver import MouldSolution, gauge_transform, normalize_zero_resonant, solve, verify_solution

__version__ = "0.1.0"

__all__ = [
    "MouldError", "HomogeneousProblem", "NormalFormResult", "bch", "exp_ad", "lie_contraction",
    "normal_form", "tilde_solution", "verify_normal_form", "Mould", "delta_coproduct",
    "is_alternal", "is_symmetral", "mould_exp", "mould_inverse", "mould_log", "mould_mul",
    "shuffle_coefficient", "FrequencyModel", "Scalar", "build_frequency_model", "MouldSolution",
    "gauge_transform", "normalize_zero_resonant", "solve", "verify_solution",
]

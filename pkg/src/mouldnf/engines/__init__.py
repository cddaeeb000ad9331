"""Concrete filtered Lie algebras and their eigen-decompositions."""

from .averaging import (TrigContext, TrigPoly, TrigPolyField, TrigPolyHamiltonian,
                        averaging_decompose, cosine, sine)
from .hamiltonian import (CanonicalPoly, HamContext, PolyHamiltonian, birkhoff_decompose,
                          poisson_bracket, quadratic_part, to_xy, to_zw)
from .moyal import MoyalSymbol, moyal_bracket, moyal_decompose, semiclassical_compare, sigma0
from .quantum import (MatrixOperator, QuantumContext, diagonal_operator, is_block_diagonal,
                      oscillator_energies, quantum_decompose, unitary)
from .vectorfields import (Polynomial, PolyVectorField, pd_decompose, pd_flow,
                           pd_linear_part, pd_problem_from_field)

__all__ = [
    "TrigContext", "TrigPoly", "TrigPolyField", "TrigPolyHamiltonian", "averaging_decompose",
    "cosine", "sine", "CanonicalPoly", "HamContext", "PolyHamiltonian", "birkhoff_decompose",
    "poisson_bracket", "quadratic_part", "to_xy", "to_zw", "MoyalSymbol", "moyal_bracket",
    "moyal_decompose", "semiclassical_compare", "sigma0", "MatrixOperator", "QuantumContext",
    "diagonal_operator", "is_block_diagonal", "oscillator_energies", "quantum_decompose",
    "unitary", "Polynomial", "PolyVectorField", "pd_decompose", "pd_flow", "pd_linear_part",
    "pd_problem_from_field",
]

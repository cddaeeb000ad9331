"""Birkhoff normal form of an anharmonic oscillator, checked against Lie series."""

from mouldnf import oracle
from mouldnf.engines.hamiltonian import HamContext, PolyHamiltonian, birkhoff_decompose, to_xy
from mouldnf.liecore import normal_form

ctx = HamContext(1, grading="eps")
B = PolyHamiltonian.monomial(ctx, (3,), (0,), eps=1)          # eps x^3
problem = birkhoff_decompose([1], B, 3, real=True)
result = normal_form(problem)

print("H = (x^2 + y^2)/2 + eps x^3")
print("modes n = k - l in complex coordinates:", [n[0] for n in problem.letters])
print("normal form (complex coordinates):", result.Z.sorted_terms())
print("normal form (real coordinates):   ", to_xy(result.Z).sorted_terms())
print("Z and Y are real:", result.Z.is_real(), result.Y.is_real())

deprit = oracle.deprit_birkhoff([1], B, 3)
print("successive Lie transforms give the same result:", deprit.normal_form == result.Z)

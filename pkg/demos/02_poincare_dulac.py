"""Poincare-Dulac normal forms of planar vector fields.

Two cases: frequencies (5, 2), where the two modes commute and the normal
form is linear, and the resonant pair (1, -1), where resonant monomials
survive.
"""

from mouldnf import oracle
from mouldnf.engines.vectorfields import PolyVectorField, pd_decompose
from mouldnf.liecore import normal_form


def show(title, omega, B, m):
    problem = pd_decompose(omega, B, m)
    result = normal_form(problem)
    print(title)
    print("  modes (eigenvalues):", ", ".join(str(n) for n in problem.letters))
    print("  Z =", result.Z.sorted_terms() or "0")
    print("  Y =", result.Y.sorted_terms())
    same = oracle.direct_conjugacy(problem, result.Y) == (problem.X0 + result.Z).truncate(m)
    print("  [X0, Z] = 0:", problem.X0.bracket(result.Z).is_zero(),
          "  raw ad iteration agrees:", same)
    print()


# X = 5 z1 d1 + 2 z2 d2 + z2^2 d1 + z2^3 d1 ; terms are (component, exponents)
show("omega = (5, 2), B = z2^2 d/dz1 + z2^3 d/dz1", (5, 2),
     PolyVectorField({(0, (0, 2)): 1, (0, (0, 3)): 1}, 2), 5)

show("omega = (1, -1), B = z2^2 d/dz1 + z1^2 z2 d/dz1 + z1 z2 d/dz2", (1, -1),
     PolyVectorField({(0, (0, 2)): 1, (0, (2, 1)): 1, (1, (1, 1)): 1}, 2), 5)

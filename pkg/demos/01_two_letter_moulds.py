"""Solve the mould equation on two letters with opposite eigenvalues.

Run with ``python3 demos/01_two_letter_moulds.py``.
"""

from mouldnf.moulds import Mould, is_alternal, is_symmetral, mould_exp
from mouldnf.solver import gauge_transform, solve, verify_solution

eigenvalues = {"lo": -1, "hi": 1}
sol = solve(eigenvalues, ["lo", "hi"], 4)

print("Letters 'lo' and 'hi' carry eigenvalues -1 and +1.")
print("Only words whose eigenvalues sum to zero may carry F:")
for word, value in sol.F.sorted_items():
    print(f"  F{list(word)} = {value}")

print("\nS is symmetral and starts like this:")
for word, value in sol.S.sorted_items()[:7]:
    print(f"  S{list(word)} = {value}")

report = verify_solution(sol)
print("\nAll defining identities hold exactly:", report.ok)
print("F alternal:", is_alternal(sol.F)[0], " S symmetral:", is_symmetral(sol.S)[0])

# A different choice of resonant gauge gives another valid solution.
J = Mould(sol.alphabet, 4, {("lo", "hi"): 1, ("hi", "lo"): -1})
other = gauge_transform(sol, mould_exp(J))
print("\nAfter a gauge change by exp(J) with J = [lo, hi]:")
print("  F is unchanged here, since [J, F] vanishes below length 6.")
print("  the generator mould G moves: G[lo hi] went from", sol.G[("lo", "hi")],
      "to", other.G[("lo", "hi")])
print("  the new solution still verifies:", verify_solution(other).ok)

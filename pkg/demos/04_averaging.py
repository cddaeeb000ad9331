"""Multiphase averaging on the two-torus with the resonance n1 = n2.

The quotient matrix q = [[1, -1]] makes the effective frequencies (1, -1),
so exactly the modes on the line n1 = n2 are resonant.
"""

from mouldnf.engines.averaging import TrigContext, TrigPolyField, averaging_decompose, cosine
from mouldnf.liecore import normal_form

ctx = TrigContext(2, 1)
terms = {}
for n in [(1, 0), (1, 1), (0, 1), (2, -1)]:
    for (mode, p, e), c in cosine(n, ctx, eps=1).items():
        terms[(2, mode, p, e)] = c          # drives the slow variable I
        terms[(0, mode, (1,), e)] = c       # and the first angle, weighted by I
X = TrigPolyField(terms, ctx)

problem = averaging_decompose(None, X, 4, q=[[1, -1]])
result = normal_form(problem)
print("modes:", problem.letters)
print("averaged field keeps only modes with n1 = n2:")
for key, value in result.Z.sorted_terms():
    target, n, p, e = key
    print(f"  target {target}  mode {n}  I^{p}  eps^{e}: {value}")
print("verified:", result.report.ok)

"""The quantum (Moyal) and classical (Poisson) normal forms agree at hbar = 0."""

from mouldnf.engines.hamiltonian import HamContext
from mouldnf.engines.moyal import MoyalSymbol, moyal_bracket, semiclassical_compare, sigma0

plain = HamContext(1)
x3 = MoyalSymbol.monomial(plain, (3,), (0,))
xi3 = MoyalSymbol.monomial(plain, (0,), (3,))
print("moyal bracket of x^3 and xi^3:", moyal_bracket(x3, xi3).sorted_terms())

ctx = sigma0([1]).ctx
for power in (3, 4):
    B = MoyalSymbol.monomial(ctx, (power,), (0,), eps=1)
    report = semiclassical_compare([1], B, 3)
    print(f"\nsigma0 + eps x^{power}")
    for row in report.by_eps_order():
        print(f"  eps^{row['eps']}: classical {row['classical'].sorted_terms()}")
        print(f"         hbar corrections {row['corrections'].sorted_terms()}")
    print("  equal at hbar = 0:", report.equal_at_hbar_zero,
          "  only even hbar powers:", report.corrections_even)

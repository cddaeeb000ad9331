"""Quantum normal forms of finite matrices and Rayleigh-Schrodinger theory."""

from mouldnf import oracle
from mouldnf.engines.quantum import (MatrixOperator, QuantumContext, is_block_diagonal,
                                     quantum_decompose, unitary)
from mouldnf.liecore import normal_form

ctx = QuantumContext(3, 1)
B = MatrixOperator({(1, 0, 1): 1, (1, 1, 0): 1, (1, 1, 2): 2, (1, 2, 1): 2,
                    (2, 0, 2): 1, (2, 2, 0): 1}, ctx)

energies = [0, 1, 3]
result = normal_form(quantum_decompose(energies, B, 4))
print("simple spectrum", energies)
corrections = oracle.rayleigh_schrodinger(energies, B, 4)
for k in range(3):
    mould = [str(result.Z.terms.get((e, k, k), 0)) for e in (1, 2, 3)]
    print(f"  level {k}: normal form {mould}   textbook {[str(c) for c in corrections[k]]}")

degenerate = [0, 0, 2]
result = normal_form(quantum_decompose(degenerate, B, 4))
print("\ndegenerate spectrum", degenerate)
print("  Z is block diagonal:", is_block_diagonal(result.Z, degenerate))
print("  Z couples the two degenerate levels:", any(r != c for (_, r, c) in result.Z.terms))
U = unitary(result.Y, 4)
print("  U U^* = 1 modulo eps^4:", U.matmul(U.conj(), 4) == MatrixOperator.identity(ctx))

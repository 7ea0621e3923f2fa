"""
Equations of motion from commutators
====================================

Build the driven exchange-chain Hamiltonian symbolically, take the
Heisenberg commutator for one interior site and compare it with two
hand-written reference forms.  Dense matrices double-check the engine.
"""

import numpy as np

from spinll.algebra import (
    build_hamiltonian, canonicalize, commutator, heisenberg_rhs, parse_expr, to_matrix,
    to_text, verify_derivation, commutator_oracle,
)
from spinll.chain import ChainConfig

# Expressions are typed in a small text syntax; s+ s- sz are Pauli ladder and
# z operators, ph(m) is the drive phase exp(i m omega t)
a = parse_expr("s+(1) s-(1) + 0.5 sz(1) sz(2)")
b = parse_expr("s-(1) s+(2)")
print("a        =", to_text(canonicalize(a)))
print("[a, b]   =", to_text(commutator(a, b)))

# The same commutator as plain 4x4 matrices
A, B = to_matrix(a, 2), to_matrix(b, 2)
print("matrix check:", np.max(np.abs(to_matrix(commutator(a, b), 2) - (A @ B - B @ A))))

# Hamiltonian of a four-site chain and the motion of site 2
cfg = ChainConfig(N=4, omega0=1.0, rabi=0.5, J_eff=1.0)
H = build_hamiltonian(cfg)
print("\nH =", to_text(H))
motion = heisenberg_rhs(2, H, cfg.N)
print("\nd sz(2)/dt =", to_text(motion.z))

# Compare with the reference forms.  Identical operator content, but some
# terms differ by real factors; the ratios show which and by how much.
for r in verify_derivation(cfg, 2):
    ratios = [round(x.real, 6) for x in r.ratios]
    print(f"{r.source:11s} {r.component:5s} match={r.matches!s:5s} ratios={ratios}")

print("\ncommutator vs dense matrices:", commutator_oracle(cfg, 2))

"""
Field tensor and its dual
=========================

Pack electric and magnetic vectors into an antisymmetric 4x4 tensor, take the
Hodge dual and the two Lorentz invariants, then boost to confirm invariance.
"""

import numpy as np

from spinll.duality import EMFieldVectors, boost, dual, extract, from_fields, invariants

f = EMFieldVectors(E=(1.0, 2.0, 3.0), H=(4.0, 5.0, 6.0))
F = from_fields(f)
print("F^{mu nu} =\n", F.entries)

# The dual swaps the roles of the fields: (E, H) -> (-H, E)
d = extract(dual(F))
print("dual fields: E =", d.E, " H =", d.H)

# Applying it twice gives back -F
print("dual(dual(F)) + F =", np.max(np.abs(dual(dual(F)).entries + F.entries)))

# H^2 - E^2 and -E.H survive any boost
print("invariants:", invariants(F))
for v in (0.3, 0.6, 0.9):
    G = boost(F, v, axis=3)
    g = extract(G)
    print(f"v={v}: E'={np.round(g.E, 3)} H'={np.round(g.H, 3)} invariants={np.round(invariants(G), 12)}")

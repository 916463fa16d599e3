#!/usr/bin/env python3
"""The quadrature certificate k(c) over the admissible speed range.

If the slow tail coefficient of a resonance profile vanished, a chain of
weighted Cauchy-Schwarz estimates would force k(c) >= 1.  Everything in
k(c) is an explicit integral of closed-form profiles, so the bound can be
computed directly: this sweep shows max k(c) ~ 0.38 <= 0.5, which is the
contradiction that protects the nondegeneracy.  Writes certificate.csv.
"""

import numpy as np

from gkdv4 import certificate as C

c_values = np.arange(0.75, 1.0001, 0.01)
sweep = C.certificate_sweep(c_values)

print("c      alpha      k1       k2       k         margin")
for r in sweep[::5]:
    print(f"{r.c:.2f}   {r.alpha:.5f}   {r.k1:.4f}   {r.k2:.4f}   "
          f"{r.k:.5f}   {r.margin:+.5f}")

k_max = max(r.k for r in sweep)
print(f"\nmax k over the sweep: {k_max:.6f}  (bound 0.5, void at 1)")
print(f"min k2 (must stay positive): {min(r.k2 for r in sweep):.6f}")

with open("certificate.csv", "w") as fh:
    fh.write("c,alpha,beta,k1,k2,k,margin\n")
    for r in sweep:
        fh.write(",".join(format(v, ".17g") for v in
                          (r.c, r.alpha, r.beta, r.k1, r.k2, r.k, r.margin)) + "\n")
print("wrote certificate.csv")

print("\ncoercivity spot check (5 seeded trials):")
for tr in C.verify_coercivity(5, seed=42):
    print(f"  quadratic-form slack = {tr.slack:+.4f}, "
          f"route agreement = {tr.route_agreement:.1e}")

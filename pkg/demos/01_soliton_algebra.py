#!/usr/bin/env python3
"""Closed-form soliton algebra and the linearized operator.

The quartic gKdV ground state is explicit, Q = (5/(2 cosh^2(3x/2)))^(1/3),
and a surprising amount of structure comes with it in closed form: the
kernel direction Q', the scaling direction LamQ with L LamQ = -Q, the
fractional power Q^{5/2} as an eigenfunction, and a bounded profile H0
with L H0 = 1.  This script samples everything on the default grid and
prints the residuals of those identities plus the classical integral
ratios.
"""

import numpy as np

from gkdv4 import profiles as P
from gkdv4.grids import SampledField

grid = P.default_grid()
x = grid.x
mask = np.abs(x) <= 15.0
q = P.q(x)

print("profile values")
print(f"  Q(0)        = {P.q(0.0):.12f}   (= (5/2)^(1/3))")
print(f"  Q_c(0), c=4 = {P.soliton_profile(4.0, 0.0):.12f}   (= 4^(1/3) Q(0))")
print(f"  H0(0)       = {P.h0_profile(grid).values[grid.index_of(0.0)]:.12f}   (= -2/3)")

print("\noperator identities, max residual on |x| <= 15 at h = 0.005")
checks = {
    "L Q'          = 0": P.apply_L(1.0, SampledField(grid, P.q_prime(x))).values,
    "L LamQ        = -Q": P.apply_L(1.0, SampledField(grid, P.lam_q(x))).values + q,
    "L Q^{5/2}     = -21/4 Q^{5/2}": P.apply_L(1.0, SampledField(grid, q ** 2.5)).values
        + 5.25 * q ** 2.5,
    "L H0          = 1": P.apply_L(1.0, P.h0_profile(grid)).values - 1.0,
}
for name, resid in checks.items():
    print(f"  {name:32s}: {np.max(np.abs(resid[mask])):.2e}")

base = P.base_integrals(grid)
h0 = P.h0_profile(grid)
print("\nintegral ratios")
print(f"  int (Q')^2 / int Q^2 = {base['int_qp2'] / base['int_q2']:.12f}  (3/7 = {3 / 7:.12f})")
lam_ratio = np.trapezoid(q * P.lam_q(x), dx=grid.h) / base["int_q2"]
print(f"  int Q LamQ / int Q^2 = {lam_ratio:.12f}  (1/12 = {1 / 12:.12f})")
h0_ratio = np.trapezoid(q * h0.values, dx=grid.h) / base["int_q"]
print(f"  int Q H0   / int Q   = {h0_ratio:.12f}  (1/6 = {1 / 6:.12f})")
print(f"\n  int Q = {base['int_q']:.12f},  int Q^2 = {base['int_q2']:.12f},"
      f"  E(Q) = {base['energy_q']:.12f}")

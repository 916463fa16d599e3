#!/usr/bin/env python3
"""Resonance profiles and their exponential tail coefficients.

For each speed ratio c the pair interaction is carried by the solution of
a third-order linear BVP whose right tail is a_I e^{-gammaI x} +
a_II e^{-gammaII x}.  The slow coefficient a_I never vanishes on the sweep
(this nondegeneracy is what the certificate of demo 03 protects), and its
sign is the same for every ratio.  Writes the sweep table as CSV.
"""

import numpy as np

from gkdv4 import resonance as R

cs = [0.75, 0.80, 0.85, 0.90, 0.95, 0.99]
rows = R.sweep_aI(cs)

print("c      gamma0   gammaI   gammaII  aI          aII          fit-resid")
for r in rows:
    print(f"{r['c']:.2f}   {r['gamma0']:.4f}   {r['gammaI']:.4f}   "
          f"{r['gammaII']:.4f}  {r['aI']:+.6f}  {r['aII']:+.5e}  {r['fit_residual']:.1e}")

signs = {np.sign(r["aI"]) for r in rows}
print(f"\nsign of aI across the sweep: {sorted(signs)} (constant: {len(signs) == 1})")

prof = R.solve_resonance(R.ResonanceParams.below_one(0.9))
slope = prof.right_log_slope(40.0, 60.0)
print(f"\nmeasured tail slope at c=0.9 on [40, 60]: {slope:.8f}")
print(f"predicted -gammaI:                        {-prof.rates.gammaI:.8f}")
print(f"BVP residual (equation-term scale):       {prof.bvp_residual_scaled:.2e}")

with open("resonance_sweep.csv", "w") as fh:
    fh.write("c,gamma0,gammaI,gammaII,aI,aII,fit_residual\n")
    for r in rows:
        fh.write(",".join(format(r[k], ".17g") for k in
                          ("c", "gamma0", "gammaI", "gammaII", "aI", "aII",
                           "fit_residual")) + "\n")
print("\nwrote resonance_sweep.csv")

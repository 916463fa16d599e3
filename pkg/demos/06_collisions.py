#!/usr/bin/env python3
"""Soliton collisions: quartic (inelastic) versus quadratic (elastic).

Drives an ingoing two-soliton configuration through collision with the
pseudospectral integrator and fits the outgoing solitons.  For the
integrable quadratic equation the fit residual sits at the solver floor;
for the quartic equation a genuine residual (shed radiation plus modified
speeds) remains.  A wide speed gap keeps this demo fast; the acceptance
suite runs the canonical (1, 0.8) pair at default resolution.
"""

from gkdv4 import pde as P
from gkdv4.rigidity import SolitonTrain

grid = P.PeriodicGrid(128.0, 2 ** 12)
train = SolitonTrain((1.0, 0.5))

for power, label in ((2, "quadratic (integrable)"), (4, "quartic")):
    rep = P.collision_experiment(train, 80.0, 80.0, grid=grid, dt=2e-3,
                                 power=power, floor_refine=False)
    fits = ", ".join(f"c = {c:.8f} at x = {s:.3f}" for c, s in rep.fitted)
    print(f"{label}:")
    print(f"  outgoing fits: {fits}")
    print(f"  H1 residual after removing fits: {rep.residual_h1:.3e}")
    print(f"  mass drift {rep.mass_drift:.1e}, energy drift {rep.energy_drift:.1e}")
    print()

print("the quartic run keeps a residual orders of magnitude above the")
print("quadratic control: the collision changed the solitons and shed")
print("radiation (inelastic), while the integrable control is clean.")

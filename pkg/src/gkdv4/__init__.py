"""Numerical laboratory for solitons of the quartic generalized KdV equation

    u_t + (u_xx + u^4)_x = 0.

Subpackages by capability:

- grids, profiles: uniform grids, quadrature/differencing, closed-form
  soliton algebra and the linearized operator L_c.
- resonance: third-order resonance boundary-value problems and the
  extraction of their exponential tail coefficients.
- certificate: the quadrature certificate k(c) together with the coercivity
  and spectral facts that back it.
- rigidity: conservation-law algebra for multi-soliton speed rigidity.
- approx: the explicit approximate multi-soliton V = R + Z + W, its residual
  and its pointwise tail lower bound.
- pde: periodic pseudospectral time integration with conservation
  diagnostics and collision experiments.
- cli: config-driven command surface ("gkdv4 <command> --config file.json").
"""

from .grids import Grid, SampledField
from .rigidity import SolitonTrain

__version__ = "0.1.0"

__all__ = ["Grid", "SampledField", "SolitonTrain", "__version__"]

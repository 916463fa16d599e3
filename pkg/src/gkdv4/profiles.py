"""Closed-form traveling-wave profiles of the quartic gKdV equation and the
linearized operator around them.

The ground state solves Q'' + Q^4 = Q and is explicit,

    Q(x) = (5 / (2 cosh^2(3x/2)))^(1/3),   Q_c(x) = c^(1/3) Q(sqrt(c) x),

which gives closed forms for every derivative through the identities
Q' = -Q tanh(3x/2), Q'' = Q - Q^4 and (Q')^2 = Q^2 - (2/5) Q^5.  All
evaluators are overflow-safe for arbitrarily large |x| (log-space cosh).

Also provided: the scaling generator LamQ = Q/3 + x Q'/2, the bounded
profile H0 with L H0 = 1, the combination J0 = H0/(2 int Q) - LamQ/int Q^2,
the positive weight F0 = ((3-sqrt(3))/8)/Q + 7 Q^2, the arctan cutoff phi,
and the operator L_c f = -f'' + c f - 4 Q_c^3 f applied on a grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grids import Grid, SampledField, cumulative_from_zero, fd2

Q0 = (5.0 / 2.0) ** (1.0 / 3.0)  # Q(0)
F0_COEFF = (3.0 - np.sqrt(3.0)) / 8.0


def _log_cosh(z):
    z = np.abs(z)
    return z + np.log1p(np.exp(-2.0 * z)) - np.log(2.0)


def q(x):
    """Ground state Q(x); even, positive, ~ 10^(1/3) e^{-|x|} at infinity."""
    x = np.asarray(x, dtype=float)
    return Q0 * np.exp(-(2.0 / 3.0) * _log_cosh(1.5 * x))


def q_prime(x):
    x = np.asarray(x, dtype=float)
    return -q(x) * np.tanh(1.5 * x)


def q_second(x):
    x = np.asarray(x, dtype=float)
    return q(x) - q(x) ** 4


def q_third(x):
    """Q''' = Q' - 4 Q^3 Q' (derivative of Q'' = Q - Q^4)."""
    x = np.asarray(x, dtype=float)
    return q_prime(x) * (1.0 - 4.0 * q(x) ** 3)


def q_pow_deriv(x, beta: float):
    """(Q^beta)' = beta Q^(beta-1) Q' = -beta Q^beta tanh(3x/2)."""
    x = np.asarray(x, dtype=float)
    return -beta * q(x) ** beta * np.tanh(1.5 * x)


def soliton_profile(c: float, x):
    """Q_c(x) = c^(1/3) Q(sqrt(c) x) for speed c > 0."""
    if c <= 0:
        raise ValueError(f"soliton speed must be positive, got c={c}")
    return c ** (1.0 / 3.0) * q(np.sqrt(c) * x)


def soliton_profile_prime(c: float, x):
    if c <= 0:
        raise ValueError(f"soliton speed must be positive, got c={c}")
    return c ** (5.0 / 6.0) * q_prime(np.sqrt(c) * x)


def lam_q(x):
    """Scaling generator LamQ = Q/3 + x Q'/2; satisfies L LamQ = -Q."""
    x = np.asarray(x, dtype=float)
    return q(x) / 3.0 + 0.5 * x * q_prime(x)


def lam_q_prime(x):
    x = np.asarray(x, dtype=float)
    return (5.0 / 6.0) * q_prime(x) + 0.5 * x * q_second(x)


def f0_weight(x):
    """Positive weight F0 = ((3-sqrt(3))/8)/Q + 7 Q^2 used by the certificate."""
    qq = q(x)
    return F0_COEFF / qq + 7.0 * qq * qq


def phi(x):
    """Cutoff phi = (2/pi) arctan(e^x): increasing, phi(-inf)=0, phi(+inf)=1.

    Uses phi(x) + phi(-x) = 1 to evaluate on the decaying side (no overflow).
    """
    x = np.asarray(x, dtype=float)
    small = (2.0 / np.pi) * np.arctan(np.exp(-np.abs(x)))
    return np.where(x <= 0, small, 1.0 - small)


def phi_prime(x):
    x = np.asarray(x, dtype=float)
    return np.exp(-_log_cosh(x)) / np.pi


def phi_third(x):
    """phi''' = sech(x)(tanh^2 - sech^2)/pi; satisfies phi''' <= phi'."""
    x = np.asarray(x, dtype=float)
    sech = np.exp(-_log_cosh(x))
    th = np.tanh(x)
    return sech * (th * th - sech * sech) / np.pi


def g_forcing(c: float, x, sign: int = -1):
    """Forcing profile e^{sign*sqrt(c) x} Q^3(x) (sign=-1 below 1, +1 above).

    Q^3 = (5/2)/cosh^2(3x/2), which decays like 10 e^{-3|x|}.
    """
    x = np.asarray(x, dtype=float)
    logq3 = np.log(2.5) - 2.0 * _log_cosh(1.5 * x)
    return np.exp(sign * np.sqrt(c) * x + logq3)


def g_forcing_prime(c: float, x, sign: int = -1):
    """(e^{sign*sqrt(c) x} Q^3)' in closed form."""
    x = np.asarray(x, dtype=float)
    return g_forcing(c, x, sign) * (sign * np.sqrt(c) - 3.0 * np.tanh(1.5 * x))


@lru_cache(maxsize=32)
def _base_integrals(key):
    x_min, x_max, n = key
    g = Grid(x_min, x_max, n)
    x, h = g.x, g.h
    qq = q(x)
    qp = q_prime(x)
    vals = {
        "int_q": float(np.trapezoid(qq, dx=h)),
        "int_q2": float(np.trapezoid(qq ** 2, dx=h)),
        "int_qp2": float(np.trapezoid(qp ** 2, dx=h)),
        "int_q5": float(np.trapezoid(qq ** 5, dx=h)),
        "int_q72": float(np.trapezoid(qq ** 3.5, dx=h)),
    }
    vals["energy_q"] = vals["int_qp2"] - 0.4 * vals["int_q5"]
    return vals


def base_integrals(grid: Grid | None = None) -> dict:
    """int Q, int Q^2, int (Q')^2, int Q^5, int Q^{7/2} and E(Q) by quadrature."""
    if grid is None:
        grid = default_grid()
    return _base_integrals((grid.x_min, grid.x_max, grid.n))


def default_grid() -> Grid:
    """Default verification grid: [-40, 40], h = 0.005 (tails ~ e^{-40})."""
    return Grid.from_spacing(-40.0, 40.0, 0.005)


def h0_profile(grid: Grid) -> SampledField:
    """H0 = 1 + (Q' int_0^x Q^2 - 2 Q^3)/3, the bounded solution of L H0 = 1.

    The inner cumulative integral has no closed form and is computed by
    cumulative trapezoid from 0 with the Euler-Maclaurin endpoint correction
    (the integrand's derivative (Q^2)' = 2QQ' is closed-form).
    """
    grid.requires_span(-20.0, 20.0)
    x = grid.x
    qq, qp = q(x), q_prime(x)
    i_q2 = cumulative_from_zero(grid, qq ** 2, 2.0 * qq * qp)
    return SampledField(grid, 1.0 + (qp * i_q2 - 2.0 * qq ** 3) / 3.0)


def h0_prime(grid: Grid) -> np.ndarray:
    """Closed-form derivative of H0 (uses H0' = (Q'' I + Q'Q^2 - 6 Q^2 Q')/3)."""
    x = grid.x
    qq, qp = q(x), q_prime(x)
    i_q2 = cumulative_from_zero(grid, qq ** 2, 2.0 * qq * qp)
    return (q_second(x) * i_q2 + qp * qq ** 2 - 6.0 * qq ** 2 * qp) / 3.0


def j0_profile(grid: Grid) -> SampledField:
    """J0 = H0/(2 int Q) - LamQ/int Q^2; bounded, even, -> 1/(2 int Q) at inf."""
    h0 = h0_profile(grid)
    base = base_integrals(grid)
    vals = h0.values / (2.0 * base["int_q"]) - lam_q(grid.x) / base["int_q2"]
    return SampledField(grid, vals)


def apply_L(c: float, f: SampledField) -> SampledField:
    """L_c f = -f'' + c f - 4 Q_c^3 f with 4th-order finite differences.

    Values inside the untrusted edge band use one-sided stencils; use
    interior_max_norm for any norm of the result.
    """
    if c <= 0:
        raise ValueError(f"speed must be positive, got c={c}")
    x = f.grid.x
    qc3 = soliton_profile(c, x) ** 3
    vals = -fd2(f.values, f.grid.h) + c * f.values - 4.0 * qc3 * f.values
    return SampledField(f.grid, vals)


@dataclass(frozen=True)
class ProfileCatalog:
    """Namespace view of the closed-form evaluators (kept for discoverability)."""

    q = staticmethod(q)
    q_prime = staticmethod(q_prime)
    q_second = staticmethod(q_second)
    soliton = staticmethod(soliton_profile)
    lam_q = staticmethod(lam_q)
    f0 = staticmethod(f0_weight)
    phi = staticmethod(phi)
    phi_prime = staticmethod(phi_prime)
    g_forcing = staticmethod(g_forcing)


def sample(fn, grid: Grid, *args) -> SampledField:
    """Sample a callable on a grid as a SampledField."""
    return SampledField(grid, fn(grid.x, *args) if args else fn(grid.x))

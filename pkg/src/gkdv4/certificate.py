"""Quadrature certificate k(c) and the coercivity/spectral facts behind it.

The nondegeneracy of the resonance tail coefficient reduces to a chain of
explicit weighted integrals: decompose the forcing G_c = G0 + alpha Q' +
beta Q (G0 orthogonal to Q^{5/2} and Q'), project with the weight
1/F0 (F0 = ((3-sqrt3)/8)/Q + 7Q^2), and form

    k(c) = c(1-c)^2 N(J0) / |3 alpha/7 + sqrt(c)(1-c)(G0,J0)| * k1(c)/k2(c),

with N(f) = (int (Pf)^2/F0)^{1/2}, P the 1/F0-orthogonal projection off
span(Q^{5/2}, Q'), and k1, k2 the explicit combinations computed here.
The certified bound is max k(c) <= 0.5 on [3/4, 1]; values >= 1 would void
the argument.

The supporting facts are checked numerically as well: the coercivity of
B -> int L(B') B Q'/Q^2 under the two orthogonality conditions (via the
substitutions D = B/Q^2, E = B Q^{-1/2}, F = BQ and the power-identity
family), and the Schrodinger operators -d_xx - (beta(2 beta+3)/5) Q^3 with
explicit eigenpairs (Q^beta, -beta^2) and, for beta = 3, (Q'Q^{1/2}, -9/4).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import profiles
from .grids import Grid, SampledField, fd2, inner
from .profiles import (f0_weight, h0_profile, j0_profile, q, q_pow_deriv,
                       q_prime, q_second)


class CertificateVoidError(RuntimeError):
    """k2(c) <= 0: the certificate bound collapses."""


class NearSingularError(RuntimeError):
    """Denominator |3 alpha/7 + sqrt(c)(1-c)(G0,J0)| below tolerance."""


@dataclass(frozen=True)
class WeightedSpace:
    """Grid data for the 1/F0-weighted inner product and its projection."""

    grid: Grid
    f0: np.ndarray
    q52: np.ndarray
    qp: np.ndarray
    gram: np.ndarray  # 2x2, diagonal up to roundoff by parity

    @property
    def h(self) -> float:
        return self.grid.h

    def weighted_inner(self, fv: np.ndarray, gv: np.ndarray) -> float:
        return inner(fv, gv / self.f0, self.h)

    def project(self, fv: np.ndarray) -> np.ndarray:
        """Pf = f - lam1 Q^{5/2} - lam2 Q', orthogonal in the 1/F0 product."""
        rhs = np.array([self.weighted_inner(fv, self.q52),
                        self.weighted_inner(fv, self.qp)])
        lam = np.linalg.solve(self.gram, rhs)
        return fv - lam[0] * self.q52 - lam[1] * self.qp

    def norm(self, fv: np.ndarray) -> float:
        pf = self.project(fv)
        return float(np.sqrt(self.weighted_inner(pf, pf)))


def weighted_space(grid: Grid | None = None) -> WeightedSpace:
    if grid is None:
        grid = profiles.default_grid()
    x = grid.x
    f0 = f0_weight(x)
    q52 = q(x) ** 2.5
    qp = q_prime(x)
    g11 = inner(q52, q52 / f0, grid.h)
    g22 = inner(qp, qp / f0, grid.h)
    g12 = inner(q52, qp / f0, grid.h)
    gram = np.array([[g11, g12], [g12, g22]])
    return WeightedSpace(grid, f0, q52, qp, gram)


def decompose_G(c: float, grid: Grid | None = None):
    """Split G_c = e^{-sqrt(c) x} Q^3 into G0 + alpha Q' + beta Q with G0
    orthogonal (plain L2) to Q^{5/2} and Q'."""
    if not 0.70 <= c <= 1.0:
        raise ValueError(f"decompose_G expects 0.70 <= c <= 1, got {c}")
    if grid is None:
        grid = profiles.default_grid()
    x, h = grid.x, grid.h
    gc = profiles.g_forcing(c, x, -1)
    qq, qp = q(x), q_prime(x)
    alpha = inner(gc, qp, h) / inner(qp, qp, h)
    beta = inner(gc, qq ** 2.5, h) / inner(qq ** 3.5, np.ones_like(x), h)
    g0 = gc - alpha * qp - beta * qq
    # orthogonality is exact up to quadrature roundoff; verify
    r1 = abs(inner(g0, qp, h)) / (np.linalg.norm(g0) * np.linalg.norm(qp) * h)
    r2 = abs(inner(g0, qq ** 2.5, h)) / (np.linalg.norm(g0) * np.linalg.norm(qq ** 2.5) * h)
    if max(r1, r2) > 1e-10:
        raise RuntimeError(f"forcing decomposition lost orthogonality: {r1:.1e}, {r2:.1e}")
    return SampledField(grid, g0), float(alpha), float(beta)


def weighted_projection(f: SampledField, space: WeightedSpace) -> SampledField:
    return SampledField(space.grid, space.project(f.values))


@dataclass(frozen=True)
class CertificateReport:
    c: float
    alpha: float
    beta: float
    ip_G0_H0: float
    ip_G0_J0: float
    N_H0: float
    N_QpOverQ: float
    N_J0: float
    N_Qp3: float
    k1: float
    k2: float
    k: float
    margin: float
    denominator: float

    @property
    def ok(self) -> bool:
        return self.k2 > 0.0 and 0.0 <= self.k <= 0.5


def weighted_norms(c: float, grid: Grid | None = None,
                   space: WeightedSpace | None = None) -> CertificateReport:
    """All certificate ingredients for one speed; k fields included.

    The composite that enters k1 is evaluated in the overflow-safe form
    (Q'/Q^2) G0 = -tanh(3x/2) (e^{-sqrt(c)x} Q^2 + alpha tanh(3x/2) - beta).
    """
    if grid is None:
        grid = profiles.default_grid()
    if space is None:
        space = weighted_space(grid)
    x, h = grid.x, grid.h
    g0f, alpha, beta = decompose_G(c, grid)
    g0 = g0f.values
    h0 = h0_profile(grid).values
    j0 = j0_profile(grid).values
    base = profiles.base_integrals(grid)
    int_q = base["int_q"]

    ip_g0_h0 = inner(g0, h0, h)
    ip_g0_j0 = inner(g0, j0, h)

    t = np.tanh(1.5 * x)
    qq = q(x)
    qp_over_q = -t
    qp3 = q_prime(x) ** 3
    qpq2_g0 = -t * (np.exp(-np.sqrt(c) * x) * qq * qq + alpha * t - beta)

    n_h0 = space.norm(h0)
    n_qpq = space.norm(qp_over_q)
    n_j0 = space.norm(j0)
    n_qp3 = space.norm(qp3)

    k1_arg = (-(6.0 / int_q) * ip_g0_h0 * qp_over_q
              + 28.0 * ip_g0_j0 * qp3 + qpq2_g0)
    k1 = space.norm(k1_arg)
    theta = np.sqrt(c) * (1.0 - c)
    k2 = 1.0 - theta * ((3.0 / int_q) * n_h0 * n_qpq + 14.0 * n_j0 * n_qp3)

    denom = abs(3.0 * alpha / 7.0 + theta * ip_g0_j0)
    if denom < 1e-10:
        raise NearSingularError(f"certificate denominator {denom:.2e} at c={c}")
    if k2 <= 0.0:
        raise CertificateVoidError(f"k2(c) = {k2} <= 0 at c={c}")
    k = c * (1.0 - c) ** 2 * n_j0 / denom * k1 / k2
    return CertificateReport(c, alpha, beta, ip_g0_h0, ip_g0_j0,
                             n_h0, n_qpq, n_j0, n_qp3,
                             float(k1), float(k2), float(k), 0.5 - float(k),
                             float(denom))


def certificate_k(c: float, grid: Grid | None = None,
                  space: WeightedSpace | None = None) -> CertificateReport:
    """The certificate value k(c); requires 0.75 <= c <= 1."""
    c = min(float(c), 1.0) if 1.0 < c < 1.0 + 1e-9 else float(c)
    if not 0.75 <= c <= 1.0:
        raise ValueError(f"certificate_k expects 3/4 <= c <= 1, got {c}")
    return weighted_norms(c, grid, space)


def certificate_sweep(c_values, grid: Grid | None = None) -> list:
    """k(c) over a sweep, sharing the weighted-space setup."""
    if grid is None:
        grid = profiles.default_grid()
    space = weighted_space(grid)
    return [certificate_k(float(c), grid, space) for c in sorted(c_values)]


# ---------------------------------------------------------------------------
# Coercivity trials


def _bump_family(rng, x):
    """Random sum of 3-6 Gaussian bumps with closed-form derivatives."""
    n_b = int(rng.integers(3, 7))
    centers = rng.uniform(-8.0, 8.0, n_b)
    widths = rng.uniform(0.5, 3.0, n_b)
    amps = rng.uniform(-1.0, 1.0, n_b)
    f = np.zeros_like(x)
    fp = np.zeros_like(x)
    fppp = np.zeros_like(x)
    for mu, w, a in zip(centers, widths, amps):
        u = x - mu
        g = a * np.exp(-u * u / (2.0 * w * w))
        f += g
        fp += -(u / w ** 2) * g
        fppp += (3.0 * u / w ** 4 - u ** 3 / w ** 6) * g
    return f, fp, fppp


def _trial_b0(rng, grid: Grid):
    """Admissible trial: bumps minus plain-L2 projections on Q^{5/2}, Q'."""
    x, h = grid.x, grid.h
    raw, raw_p, raw_ppp = _bump_family(rng, x)
    qq, qp = q(x), q_prime(x)
    q52 = qq ** 2.5
    lam1 = inner(raw, q52, h) / inner(q52, q52, h)
    lam2 = inner(raw, qp, h) / inner(qp, qp, h)
    b0 = raw - lam1 * q52 - lam2 * qp
    q52_p = q_pow_deriv(x, 2.5)
    # (Q^{5/2})''' and (Q')''' = Q'''' from the closed-form power identities
    q52_ppp = qp * ((125.0 / 8.0) * qq ** 1.5 - 22.0 * qq ** 4.5)
    qpp = q_second(x)
    q4 = qpp - 12.0 * qq ** 2 * qp ** 2 - 4.0 * qq ** 3 * qpp
    b0_p = raw_p - lam1 * q52_p - lam2 * qpp
    b0_ppp = raw_ppp - lam1 * q52_ppp - lam2 * q4
    return b0, b0_p, b0_ppp


@dataclass(frozen=True)
class CoercivityTrial:
    lhs_direct: float
    lhs_identity: float
    rhs: float
    slack: float
    route_agreement: float  # |direct-identity| / max(|direct|, rhs)
    aggregate_slack_by_c: dict


def coercivity_lhs_identity(b0, b0_p, x, h):
    """int L(B') B Q'/Q^2 via the D = B/Q^2 substitution identity."""
    qq = q(x)
    qp = q_prime(x)
    d = b0 / qq ** 2
    dp = b0_p / qq ** 2 - 2.0 * b0 * qp / qq ** 3
    t1 = inner(dp * dp, 1.5 * qq ** 3 + 0.3 * qq ** 6, h)
    t2 = inner(d * d, 3.0 * qq ** 3 - 4.2 * qq ** 6 + 1.2 * qq ** 9, h)
    return t1 - t2


def verify_coercivity(trial_count: int = 100, grid: Grid | None = None,
                      seed: int = 0, c_values=(0.75, 0.85, 1.0)) -> list:
    """Seeded trials of the coercivity inequality.

    For each admissible B0 the quadratic form int L(B0') B0 Q'/Q^2 is
    evaluated directly (closed-form derivatives) and through the
    substitution identity; both must agree and dominate
    (3/8) int B0^2/Q + 7 int B0^2 Q^2 up to eps_num = 1e-6 ||B0||^2.
    The aggregate form with the sqrt(c)(1-c) int B0^2 Q'/Q^2 term against
    int B0^2 F0 is evaluated for each c in c_values.
    """
    if trial_count < 1:
        raise ValueError("need at least one trial")
    if grid is None:
        grid = profiles.default_grid()
    x, h = grid.x, grid.h
    qq = q(x)
    qp = q_prime(x)
    t = np.tanh(1.5 * x)
    f0 = f0_weight(x)
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(trial_count):
        b0, b0_p, b0_ppp = _trial_b0(rng, grid)
        lb0p = -b0_ppp + b0_p - 4.0 * qq ** 3 * b0_p
        lhs_direct = inner(lb0p * b0, -t / qq, h)
        lhs_ident = coercivity_lhs_identity(b0, b0_p, x, h)
        rhs = 0.375 * inner(b0 * b0, 1.0 / qq, h) + 7.0 * inner(b0 * b0, qq * qq, h)
        norm2 = inner(b0, b0, h)
        slack = lhs_direct - rhs + 1e-6 * norm2
        agree = abs(lhs_direct - lhs_ident) / max(abs(lhs_direct), rhs)
        agg = {}
        for c in c_values:
            theta = np.sqrt(c) * (1.0 - c)
            lhs_c = lhs_direct + theta * inner(b0 * b0, -t / qq, h)
            agg[c] = lhs_c - inner(b0 * b0, f0, h) + 1e-6 * norm2
        out.append(CoercivityTrial(lhs_direct, lhs_ident, rhs, float(slack),
                                   float(agree), agg))
    return out


def power_identity_residual(seed: int = 1, grid: Grid | None = None,
                            beta: float = 0.5) -> float:
    """Relative residual of int [(D Q^{1+beta})']^2 = int (D')^2 Q^{2+2beta}
    + (1+beta) int D^2 (-(1+beta) Q^{2+2beta} + ((2beta+5)/5) Q^{5+2beta})
    for a random bump D (beta = 1/2 is the E-identity, beta = 2 the F one)."""
    if grid is None:
        grid = profiles.default_grid()
    x, h = grid.x, grid.h
    rng = np.random.default_rng(seed)
    d, dp, _ = _bump_family(rng, x)
    qq, qp = q(x), q_prime(x)
    b = 1.0 + beta
    lhs_field = dp * qq ** b + b * d * qq ** (b - 1.0) * qp
    lhs = inner(lhs_field, lhs_field, h)
    rhs = inner(dp * dp, qq ** (2.0 * b), h) + b * inner(
        d * d, -b * qq ** (2.0 * b) + ((2.0 * beta + 5.0) / 5.0) * qq ** (3.0 + 2.0 * b), h)
    return abs(lhs - rhs) / abs(lhs)


# ---------------------------------------------------------------------------
# Spectral facts


@dataclass(frozen=True)
class SpectralReport:
    beta: float
    ground_residual: float        # ||w'' + V Q^3 w - beta^2 w|| at w = Q^beta
    ground_rayleigh_error: float  # |RQ(Q^beta) + beta^2|
    second_residual: float | None  # beta = 3 only, at w = Q' Q^{1/2}
    eig_low3: tuple | None        # lowest discrete eigenvalues (beta = 3)
    complement_min: float | None  # smallest eigenvalue past the two bound states
    q3_pointwise_ok: bool         # (3/5) Q^3 <= 3/2 everywhere


def verify_spectral_facts(beta: float, grid: Grid | None = None) -> SpectralReport:
    """Eigenpair checks for H_beta = -d_xx - (beta(2beta+3)/5) Q^3.

    Ground state Q^beta at -beta^2 (residual via 4th-order differencing and
    Rayleigh quotient with closed-form derivative); for beta = 3 also the
    second eigenfunction Q'Q^{1/2} at -(beta-3/2)^2 and a tridiagonal
    eigensolve on [-30, 30] confirming that below the two bound states the
    form int (w')^2 - (27/5) int Q^3 w^2 is nonnegative.
    """
    if not 1.5 <= beta <= 4.0:
        raise ValueError(f"beta must be in [3/2, 4], got {beta}")
    if grid is None:
        grid = profiles.default_grid()
    x, h = grid.x, grid.h
    v = beta * (2.0 * beta + 3.0) / 5.0
    qq = q(x)
    w = qq ** beta
    res = fd2(w, h) + v * qq ** 3 * w - beta ** 2 * w
    mask = np.abs(x) <= 15.0
    ground_residual = float(np.max(np.abs(res[mask])))
    wp = q_pow_deriv(x, beta)
    rq = (inner(wp, wp, h) - v * inner(qq ** 3, w * w, h)) / inner(w, w, h)
    ground_rayleigh_error = float(abs(rq + beta ** 2))

    second_residual = None
    eig_low3 = None
    complement_min = None
    if abs(beta - 3.0) < 1e-12:
        w2 = q_prime(x) * qq ** 0.5
        res2 = fd2(w2, h) + v * qq ** 3 * w2 - (beta - 1.5) ** 2 * w2
        second_residual = float(np.max(np.abs(res2[mask])))
        eg = Grid.from_spacing(-30.0, 30.0, 0.01)
        xe, he = eg.x, eg.h
        diag = 2.0 / he ** 2 - v * q(xe) ** 3
        off = -np.ones(eg.n - 1) / he ** 2
        vals = eigh_tridiagonal(diag, off, select="i",
                                select_range=(0, 2), eigvals_only=True)
        eig_low3 = tuple(float(v_) for v_ in vals)
        complement_min = eig_low3[2]

    q3_ok = bool(np.all(0.6 * qq ** 3 <= 1.5 + 1e-14))
    return SpectralReport(beta, ground_residual, ground_rayleigh_error,
                          second_residual, eig_low3, complement_min, q3_ok)

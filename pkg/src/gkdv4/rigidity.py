"""Conservation-law algebra for multi-soliton speed rigidity.

A train of solitons with speeds c_1 > ... > c_N determines three conserved
quantities (mass, energy, integral of u), each a power sum of the speeds.
Equating the power sums at both time infinities pins the incoming speeds:
this module evaluates the explicit bound chain (universal bracket
(16/25, 3/2) on incoming speeds, |N^- - N| <= sqrt(N)/8), scans the
two-soliton power-sum system for solutions, and computes the geometric
quantities sigma_0, gamma_0, j_0 and the observation line x_0(t) used by
the approximate-solution and PDE experiments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import profiles

SPEED_SUM_CAP = 1.0 / 16.0


@dataclass(frozen=True)
class SolitonTrain:
    """Ordered soliton speeds c_1 > ... > c_N > 0 with phase shifts."""

    speeds: tuple
    shifts: tuple = None

    def __post_init__(self):
        speeds = tuple(float(c) for c in self.speeds)
        if len(speeds) < 1:
            raise ValueError("need at least one soliton")
        if any(c <= 0 for c in speeds):
            raise ValueError("speeds must be positive")
        if any(a <= b for a, b in zip(speeds, speeds[1:])):
            raise ValueError("speeds must be strictly decreasing")
        shifts = self.shifts
        if shifts is None:
            shifts = (0.0,) * len(speeds)
        shifts = tuple(float(d) for d in shifts)
        if len(shifts) != len(speeds):
            raise ValueError("one shift per speed required")
        object.__setattr__(self, "speeds", speeds)
        object.__setattr__(self, "shifts", shifts)

    @property
    def n(self) -> int:
        return len(self.speeds)

    @property
    def speed_condition_sum(self) -> float:
        """sum_{j>=2} (1 - c_j)^2, the quantity capped by 1/16."""
        return float(sum((1.0 - c) ** 2 for c in self.speeds[1:]))

    @property
    def satisfies_speed_condition(self) -> bool:
        return self.speeds[0] == 1.0 and self.speed_condition_sum <= SPEED_SUM_CAP


@dataclass(frozen=True)
class ConservedTriple:
    mass: float
    energy: float
    integral: float


@dataclass(frozen=True)
class SpeedGeometry:
    """sigma_0 = min_j sqrt(c_{j+1})(c_j - c_{j+1}), attained at index j0;
    gamma_0 the associated tail rate; x_0(t) = x0_slope*t - K0."""

    j0: int                # 1-based index attaining the minimum
    sigma0: float
    gamma0: float
    x0_slope: float        # sigma0/gamma0 + c_{j0}

    def x0(self, t, k0: float):
        return self.x0_slope * np.asarray(t, dtype=float) - k0


def train_invariants(train: SolitonTrain, grid=None) -> ConservedTriple:
    """Mass, energy and integral of an outgoing train.

    Scaling gives int Q_c^2 = c^{1/6} int Q^2, E(Q_c) = c^{7/6} E(Q) and
    int Q_c = c^{-1/6} int Q, so each invariant is a power sum of speeds
    times the corresponding base integral of Q.
    """
    base = profiles.base_integrals(grid)
    c = np.array(train.speeds)
    return ConservedTriple(
        mass=float(np.sum(c ** (1.0 / 6.0))) * base["int_q2"],
        energy=float(np.sum(c ** (7.0 / 6.0))) * base["energy_q"],
        integral=float(np.sum(c ** (-1.0 / 6.0))) * base["int_q"],
    )


# ---------------------------------------------------------------------------
# Explicit bound chain for the incoming speeds


def f_power(x):
    """f(x) = x^7 + 3/x - 4x, the convex combination of the three power sums."""
    x = np.asarray(x, dtype=float)
    return x ** 7 + 3.0 / x - 4.0 * x


def f_power_second(x):
    x = np.asarray(x, dtype=float)
    return 42.0 * x ** 5 + 6.0 / x ** 3


M1 = (24.0 / 5.0) * (35.0 / 3.0) ** (3.0 / 8.0)            # min f''/2
M2 = 5.0 * (3.0 / 35.0) ** (3.0 / 8.0) * (1.0 - 0.75 ** (1.0 / 6.0)) ** 2
A1 = (1.0 - 0.75 ** (1.0 / 6.0)) / (1.0 + 0.75 ** (1.0 / 12.0))
A2 = np.sqrt(5.0) * (3.0 / 35.0) ** (3.0 / 16.0) * (1.0 - 0.75 ** (1.0 / 6.0)) \
    / (1.0 + 0.8 ** (1.0 / 6.0))


@dataclass(frozen=True)
class SpeedBounds:
    lower: float = 16.0 / 25.0
    upper: float = 1.5
    deltaN_max: float = 0.0
    m1: float = M1
    m2: float = M2
    sharp_lower: float = (1.0 - np.sqrt(M2)) ** 6
    sharp_upper: float = (1.0 + np.sqrt(M2)) ** 6
    a1: float = A1
    a2: float = A2
    a: float = A1 + A2
    forced_equal_count: bool = False


def incoming_speed_bounds(train: SolitonTrain) -> SpeedBounds:
    """Universal bounds on the incoming speeds and soliton count.

    Requires the outgoing train to satisfy the speed condition with c_1 = 1.
    Asserts the derived chain: (1-sqrt(m2))^6 > 16/25, (1+sqrt(m2))^6 < 3/2
    and 2a + a^2/sqrt(2) < 1/8.
    """
    if not train.satisfies_speed_condition:
        raise ValueError("train must satisfy the speed condition with c_1 = 1")
    b = SpeedBounds(deltaN_max=np.sqrt(train.n) / 8.0,
                    forced_equal_count=train.n <= 64)
    assert b.sharp_lower > b.lower and b.sharp_upper < b.upper
    assert 2.0 * b.a + b.a ** 2 / np.sqrt(2.0) < 1.0 / 8.0
    return b


def f_bounds_check(grid_step: float = 1e-3) -> dict:
    """Grid verification of the f(x) envelope used by the bound chain.

    Checks f(1) = f'(1) = 0, f >= m1 (1-x)^2 on (0, 3/2], f <= 24 (1-x)^2 on
    [3/4, 1], and f'' >= 2 m1 everywhere on the grid.
    """
    if grid_step > 1e-3:
        raise ValueError("grid step must be <= 1e-3")
    x = np.arange(grid_step, 1.5 + grid_step / 2, grid_step)
    fx = f_power(x)
    lower_slack = fx - M1 * (1.0 - x) ** 2
    mid = (x >= 0.75) & (x <= 1.0)
    upper_slack = 24.0 * (1.0 - x[mid]) ** 2 - f_power(x[mid])
    fpp_slack = f_power_second(x) - 2.0 * M1
    x_star = (3.0 / 35.0) ** 0.125
    report = {
        "f_at_1": float(f_power(1.0)),
        "fpp_at_xstar_minus_2m1": float(f_power_second(x_star) - 2.0 * M1),
        "min_lower_slack": float(lower_slack.min()),
        "min_upper_slack": float(upper_slack.min()),
        "min_fpp_slack": float(fpp_slack.min()),
    }
    report["ok"] = (report["f_at_1"] == 0.0
                    and abs(report["fpp_at_xstar_minus_2m1"]) < 1e-10
                    and report["min_lower_slack"] > -1e-12
                    and report["min_upper_slack"] > -1e-12
                    and report["min_fpp_slack"] > -1e-10)
    return report


# ---------------------------------------------------------------------------
# Two-soliton power-sum rigidity


def _newton_polish_pair(a: float, x: float, iters: int = 40):
    """Newton on g(a) = a^7 + (1+x-a)^7 - 1 - x^7 along the sum constraint."""
    for _ in range(iters):
        b = 1.0 + x - a
        g = a ** 7 + b ** 7 - 1.0 - x ** 7
        dg = 7.0 * (a ** 6 - b ** 6)
        if dg == 0.0:
            break
        step = g / dg
        a -= step
        if abs(step) < 1e-15:
            break
    return a


def two_soliton_rigidity_scan(x: float, n_max: int = 2, grid_step: float = 1e-3,
                              tol: float = 1e-6, coarse_tol: float = 1e-4) -> list:
    """Scan the three power-sum equations for soliton-count candidates.

    For N = 2 the constraint a + b = 1 + x is exact and the scan root-finds
    a^7 + b^7 = 1 + x^7 along it, keeping only roots that also satisfy
    1/a + 1/b = 1 + 1/x within tol; the expected outcome is the single
    (ordered) solution (1, x).  For N = 3, 4 the scan covers two-value
    configurations a (k times) and b (N-k times) on a coarse grid, using the
    linear constraint to eliminate b; candidates are configurations whose
    remaining two residuals are both below coarse_tol.  Returns a list of
    dicts, one per candidate.
    """
    if not 0.0 < x < 1.0:
        raise ValueError("need 0 < x < 1")
    candidates = []

    # N = 2: exact scan plus Newton polish.
    a_grid = np.arange(grid_step, 1.0 + x - grid_step / 2, grid_step)
    b_grid = 1.0 + x - a_grid
    g = a_grid ** 7 + b_grid ** 7 - 1.0 - x ** 7
    roots = []
    sign_change = np.nonzero(np.diff(np.sign(g)) != 0)[0]
    for i in sign_change:
        roots.append(_newton_polish_pair(a_grid[i], x))
    roots.extend(_newton_polish_pair(a0, x) for a0 in (1.0, x))  # seed the known pair
    seen = []
    for a in roots:
        b = 1.0 + x - a
        if a < b:
            a, b = b, a
        if b <= 0:
            continue
        if any(abs(a - s) < 1e-8 for s in seen):
            continue
        r_sum7 = a ** 7 + b ** 7 - 1.0 - x ** 7
        r_inv = 1.0 / a + 1.0 / b - 1.0 - 1.0 / x
        if max(abs(r_sum7), abs(r_inv)) < tol:
            seen.append(a)
            candidates.append({"n": 2, "values": (a, b), "counts": (1, 1),
                               "residual": max(abs(r_sum7), abs(r_inv))})

    # N = 3..n_max: two-value configurations (Lagrange-multiplier structure).
    for n in range(3, n_max + 1):
        for k in range(1, n):
            a_grid = np.arange(grid_step, 1.0 + x - grid_step / 2, grid_step)
            b_grid = (1.0 + x - k * a_grid) / (n - k)
            ok = b_grid > 0
            a_ok, b_ok = a_grid[ok], b_grid[ok]
            r7 = k * a_ok ** 7 + (n - k) * b_ok ** 7 - 1.0 - x ** 7
            rinv = k / a_ok + (n - k) / b_ok - 1.0 - 1.0 / x
            res = np.maximum(np.abs(r7), np.abs(rinv))
            for i in np.nonzero(res < coarse_tol)[0]:
                candidates.append({"n": n, "values": (float(a_ok[i]), float(b_ok[i])),
                                   "counts": (k, n - k), "residual": float(res[i])})
    return candidates


# ---------------------------------------------------------------------------
# Speed geometry and the pointwise-decay inequalities


def speed_geometry(train: SolitonTrain) -> SpeedGeometry:
    """Compute j0, sigma_0, gamma_0 and the slope of the observation line."""
    if train.n < 2:
        raise ValueError("speed geometry needs at least two solitons")
    c = np.array(train.speeds)
    gaps = np.sqrt(c[1:]) * (c[:-1] - c[1:])
    j0 = int(np.argmin(gaps))  # smallest index on ties
    sigma0 = float(gaps[j0])
    cj, cj1 = c[j0], c[j0 + 1]
    gamma0 = float(np.sqrt(cj - 0.75 * cj1) - 0.5 * np.sqrt(cj1))
    geom = SpeedGeometry(j0=j0 + 1, sigma0=sigma0, gamma0=gamma0,
                         x0_slope=sigma0 / gamma0 + float(cj))
    if train.satisfies_speed_condition:
        assert geom.x0_slope > 1.5
    return geom


@dataclass(frozen=True)
class TailInequalityReport:
    """Slacks of the three inequalities behind the pointwise decay bound."""

    applicable: bool
    ratio_slack: float = np.nan       # sigma0/gamma0 - sqrt(c_{j0} c_{j0+1})
    unit_slack: float = np.nan        # 1 - 4 sigma0/(sigma0/gamma0 - (1-c_{j0}))
    window_slack: float = np.nan      # slope - max(4/5, ...)^2 - 5 sigma0
    gsz_residual: float = np.nan      # sigma0 - (c_{j0} gamma0 - gamma0^3)

    @property
    def all_hold(self) -> bool:
        return bool(self.applicable and self.ratio_slack >= 0
                    and self.unit_slack > 0 and self.window_slack > 0)


def claim_bm_check(train: SolitonTrain) -> TailInequalityReport:
    """Evaluate the three speed-geometry inequalities for an admissible train."""
    if not train.satisfies_speed_condition:
        return TailInequalityReport(applicable=False)
    geom = speed_geometry(train)
    c = train.speeds
    cj, cj1 = c[geom.j0 - 1], c[geom.j0]
    ratio = geom.sigma0 / geom.gamma0
    ratio_slack = ratio - np.sqrt(cj * cj1)
    frac = 4.0 * geom.sigma0 / (ratio - (1.0 - cj))
    unit_slack = 1.0 - frac
    window_slack = ratio + cj - max(0.8, frac) ** 2 - 5.0 * geom.sigma0
    gsz = geom.sigma0 - (cj * geom.gamma0 - geom.gamma0 ** 3)
    return TailInequalityReport(True, float(ratio_slack), float(unit_slack),
                                float(window_slack), float(gsz))


def gamma_rate_bounds_ok(c_grid: np.ndarray) -> bool:
    """1 - sqrt(c) <= sqrt(1 - 3c/4) - sqrt(c)/2 <= 1 - c and
    sqrt(1 - 3c/4) >= 1 - sqrt(c)/2, on a grid of [0, 1]."""
    c = np.asarray(c_grid, dtype=float)
    g = np.sqrt(1.0 - 0.75 * c) - 0.5 * np.sqrt(c)
    chain = np.all(1.0 - np.sqrt(c) <= g + 1e-15) and np.all(g <= 1.0 - c + 1e-15)
    bb = np.all(np.sqrt(1.0 - 0.75 * c) + 1e-15 >= 1.0 - 0.5 * np.sqrt(c))
    return bool(chain and bb)


def sample_admissible_trains(count: int, max_n: int = 6, seed: int = 0) -> list:
    """Seeded sample of trains with c_1 = 1 and sum (1-c_j)^2 <= 1/16.

    Gap magnitudes are drawn uniformly on the sphere-scaled simplex: draw
    positive gaps, sort them increasingly, and scale so the quadratic sum is
    a uniform fraction of the cap.
    """
    rng = np.random.default_rng(seed)
    trains = []
    while len(trains) < count:
        n = int(rng.integers(2, max_n + 1))
        raw = rng.uniform(0.05, 1.0, size=n - 1)
        scale = np.sqrt(rng.uniform(0.0, 1.0) * SPEED_SUM_CAP / np.sum(raw ** 2))
        gaps = np.sort(raw * scale)  # 1-c_2 < ... < 1-c_N
        speeds = 1.0 - np.concatenate(([0.0], gaps))
        if np.any(np.diff(speeds) >= 0):
            continue
        trains.append(SolitonTrain(tuple(speeds)))
    return trains


def monte_carlo_inequalities(count: int = 1000, max_n: int = 6, seed: int = 0) -> dict:
    """Run claim_bm_check over a seeded admissible sample; count violations.

    Also verifies the gamma_0 bracket 0 < gamma_0 < (sqrt(c_j0)/4)(sqrt7-sqrt3)
    and, for trains whose minimizing index is >= 2, the sharpened rescaled
    bound gamma_0/sqrt(c_j0) <= 3/20.
    """
    trains = sample_admissible_trains(count, max_n, seed)
    bad = 0
    min_slacks = [np.inf, np.inf, np.inf]
    gamma_cap = (np.sqrt(7.0) - np.sqrt(3.0)) / 4.0
    gamma_ok = True
    tilde_ok = True
    gsz_max = 0.0
    for tr in trains:
        rep = claim_bm_check(tr)
        if not rep.all_hold:
            bad += 1
        min_slacks[0] = min(min_slacks[0], rep.ratio_slack)
        min_slacks[1] = min(min_slacks[1], rep.unit_slack)
        min_slacks[2] = min(min_slacks[2], rep.window_slack)
        gsz_max = max(gsz_max, abs(rep.gsz_residual))
        geom = speed_geometry(tr)
        cj = tr.speeds[geom.j0 - 1]
        if not 0.0 < geom.gamma0 < np.sqrt(cj) * gamma_cap:
            gamma_ok = False
        if geom.j0 >= 2 and geom.gamma0 / np.sqrt(cj) > 0.15 + 1e-12:
            tilde_ok = False
    return {"count": len(trains), "violations": bad,
            "min_slacks": tuple(float(s) for s in min_slacks),
            "gamma_bracket_ok": gamma_ok, "tilde_bound_ok": tilde_ok,
            "gsz_residual_max": float(gsz_max)}

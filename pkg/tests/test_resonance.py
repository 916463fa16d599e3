"""Resonance BVP solves, characteristic rates and tail extraction."""

import numpy as np
import pytest

from gkdv4 import resonance as R
from gkdv4.grids import Grid


def below(c):
    return R.ResonanceParams.below_one(c)


class TestCharacteristicRates:
    def test_critical_ratio_closed_form(self):
        rates = R.characteristic_rates(below(0.75))
        assert rates.gammaI == pytest.approx((np.sqrt(7) - np.sqrt(3)) / 4.0, rel=1e-14)

    def test_root_relation(self):
        for c in (0.76, 0.85, 0.95):
            r = R.characteristic_rates(below(c))
            assert abs(r.gamma0 - r.gammaI - r.gammaII) < 1e-12
            assert r.gammaII == pytest.approx(np.sqrt(c), rel=1e-14)
            assert 0 < r.gammaI < r.gammaII < r.gamma0

    def test_rate_bracket(self):
        # 1 - sqrt(c) <= gammaI <= 1 - c on the admissible range
        for c in (0.75, 0.85, 0.95):
            g = R.characteristic_rates(below(c)).gammaI
            assert 1.0 - np.sqrt(c) - 1e-14 <= g <= 1.0 - c + 1e-14

    def test_near_degenerate_roots(self):
        c = 1.0 - 1e-7
        r = R.characteristic_rates(below(c))
        assert r.gammaI == pytest.approx(0.0, abs=1e-6)
        assert r.gammaII == pytest.approx(1.0, abs=1e-6)
        assert r.gamma0 == pytest.approx(1.0, abs=1e-6)

    def test_companion_matrix_oracle(self):
        c = 0.9
        p = below(c)
        r = R.characteristic_rates(p)
        roots = sorted(np.roots([1.0, 0.0, -1.0, -p.theta]).real)
        assert roots[0] == pytest.approx(-r.gammaII, abs=1e-12)
        assert roots[1] == pytest.approx(-r.gammaI, abs=1e-12)
        assert roots[2] == pytest.approx(r.gamma0, abs=1e-12)
        assert r.cubic_residual(p.theta) < 1e-12

    def test_theta_out_of_range(self):
        bad = R.ResonanceParams(R.Family.BELOW_ONE, 0.9, None, 0.5, 0.9, -1)
        with pytest.raises(R.NoThreeRealRootsError):
            R.characteristic_rates(bad)

    def test_family_domains(self):
        with pytest.raises(ValueError):
            R.ResonanceParams.below_one(0.7)
        with pytest.raises(ValueError):
            R.ResonanceParams.above_one(1.5)
        with pytest.raises(ValueError):
            R.ResonanceParams.triple(1.0, 0.8, "I")


class TestExtraction:
    def test_exact_two_mode_recovery(self):
        rates = R.characteristic_rates(below(0.9))
        x = np.linspace(20.0, 60.0, 2000)
        vals = 2.0 * np.exp(-rates.gammaI * x) - 3.0 * np.exp(-rates.gammaII * x)
        aI, aII, resid, flag = R.extract_asymptotics(x, vals, rates, (20.0, 60.0))
        assert not flag
        assert aI == pytest.approx(2.0, abs=1e-10)
        assert aII == pytest.approx(-3.0, abs=1e-6)
        assert resid < 1e-10

    def test_remainder_below_fit_floor(self):
        rates = R.characteristic_rates(below(0.9))
        x = np.linspace(20.0, 50.0, 1500)
        vals = np.exp(-rates.gammaI * x) + np.exp(-1.5 * x)
        aI, _, _, _ = R.extract_asymptotics(x, vals, rates, (20.0, 50.0))
        assert aI == pytest.approx(1.0, abs=1e-6)

    def test_degenerate_rates_fall_back(self):
        rates = R.CharacteristicRates(2.0 / np.sqrt(3.0), 1.0 / np.sqrt(3.0),
                                      1.0 / np.sqrt(3.0) + 1e-9)
        x = np.linspace(15.0, 40.0, 500)
        vals = np.exp(-rates.gammaI * x)
        aI, aII, _, flag = R.extract_asymptotics(x, vals, rates, (15.0, 40.0))
        assert flag
        assert aII == 0.0


@pytest.fixture(scope="module")
def prof09():
    return R.solve_resonance(below(0.9))


@pytest.fixture(scope="module")
def sweep_rows():
    return R.sweep_aI([0.75, 0.80, 0.85, 0.90, 0.95])


@pytest.fixture(scope="module")
def fine_grid():
    return Grid.from_spacing(-30.0, 80.0, 0.0025)


@pytest.fixture(scope="module")
def triple_profiles(fine_grid):
    pair = R.rescaled_pair_profile(0.8, 1.0, fine_grid)
    t_i = R.triple_profile(0.8, 1.0, 1.0, "I", fine_grid)
    t_ii = R.triple_profile(0.8, 1.0, 1.0, "II", fine_grid)
    return pair, t_i, t_ii


class TestSolve:
    def test_residual_scales(self, prof09):
        assert prof09.bvp_residual_scaled < 1e-8
        assert prof09.bvp_residual < 1e-6
        assert prof09.fit_residual < 1e-6

    def test_measured_decay_rate(self, prof09):
        slope = prof09.right_log_slope(40.0, 60.0)
        assert abs(slope + prof09.rates.gammaI) < 1e-3

    def test_left_decay_bounded(self, prof09):
        # |A| e^{-gamma0 x} is bounded on the left half and matches the
        # fitted mode coefficient in the far-left asymptotic zone
        x = prof09.grid.x
        m = x < 0.0
        ratio = np.abs(prof09.values[m]) * np.exp(-prof09.rates.gamma0 * x[m])
        assert np.isfinite(ratio.max())
        # in the asymptotic zone (above the solve's absolute noise floor,
        # which the mode undercuts past x ~ -23) the mode coefficient matches
        far = (x >= -20.0) & (x <= -10.0)
        far_ratio = np.abs(prof09.values[far]) * np.exp(-prof09.rates.gamma0 * x[far])
        assert np.max(np.abs(far_ratio / abs(prof09.a0) - 1.0)) < 0.05

    def test_self_convergence(self):
        p = below(0.8)
        prof1 = R.solve_resonance(p)
        prof2 = R.solve_resonance(p, Grid.from_spacing(-30.0, 100.0, 0.0025))
        assert abs(prof1.aI - prof2.aI) / abs(prof2.aI) < 5e-4  # 3 sig digits

    def test_homogeneous_uniqueness_proxy(self):
        assert R.solve_homogeneous(below(0.9)) < 1e-8

    def test_near_degenerate_still_solves(self):
        prof = R.solve_resonance(below(0.999))
        assert prof.bvp_residual_scaled < 1e-6
        assert abs(prof.aI) > 0

    def test_grid_preconditions(self):
        with pytest.raises(ValueError):
            R.solve_resonance(below(0.9), Grid.from_spacing(-30.0, 80.0, 0.02))


class TestSweep:
    def test_sign_constant(self, sweep_rows):
        rows = sweep_rows
        signs = {np.sign(r["aI"]) for r in rows}
        assert signs == {-1.0}
        assert not any(r["inconclusive"] for r in rows)

    def test_bounded_away_from_zero(self, sweep_rows):
        assert min(abs(r["aI"]) for r in sweep_rows) > 1.0

    def test_lipschitz_estimate_finite(self):
        rows = R.sweep_aI([0.84, 0.85])
        lip = abs(rows[1]["aI"] - rows[0]["aI"]) / 0.01
        assert np.isfinite(lip) and lip < 100.0


class TestRescaledPair:
    def test_direct_equation_residual(self, fine_grid):
        for c_j, c_k in ((1.0, 0.8), (0.8, 1.0)):
            prof = R.rescaled_pair_profile(c_j, c_k, fine_grid)
            resid = R.pair_equation_residual(prof, c_j, c_k)
            assert resid < 5e-6

    def test_rate_ordering(self):
        p12 = R.rescaled_pair_profile(1.0, 0.8)
        p21 = R.rescaled_pair_profile(0.8, 1.0)
        assert p12.gammaI < p21.gammaI

    def test_sign_uniform_over_train(self):
        speeds = (1.0, 0.9, 0.85)
        signs = set()
        for j in range(3):
            for k in range(j + 1, 3):
                prof = R.rescaled_pair_profile(speeds[j], speeds[k])
                signs.add(np.sign(prof.aI))
        assert len(signs) == 1

    def test_ratio_domain(self):
        with pytest.raises(ValueError):
            R.rescaled_pair_profile(1.0, 0.5)


class TestTripleProfiles:
    """Triple profiles for the train (1, 0.8): indices (2, 1, 1)."""

    def test_equation_residuals(self, triple_profiles):
        pair, t_i, t_ii = triple_profiles
        assert R.triple_equation_residual(t_i, 0.8, 1.0, 1.0, pair.gammaI) < 1e-6
        assert R.triple_equation_residual(t_ii, 0.8, 1.0, 1.0, pair.gammaII) < 1e-6

    def test_rate_identity(self, triple_profiles):
        # gamma_{c,c'} >= 1 - gamma^{I,II} sqrt(c'), in base variables
        pair, t_i, t_ii = triple_profiles
        cpr = 0.8
        for t_prof, g_pair in ((t_i, pair.gammaI), (t_ii, pair.gammaII)):
            base = t_prof.base
            g_base = g_pair / np.sqrt(0.8)  # pair rate in ratio variables
            assert base.rates.gammaI >= 1.0 - g_base * np.sqrt(cpr) - 1e-12

    def test_branch_two_decay_bound(self, triple_profiles):
        # |A^II(x)| <~ e^{-(sqrt(c_l) - gammaII_{j,k}) x}: the claimed rate is
        # below both present modes for this branch
        pair, _, t_ii = triple_profiles
        claimed = 1.0 - pair.gammaII
        slope = t_ii.base.right_log_slope(30.0, 50.0)
        assert slope <= -claimed + 1e-2

    def test_branch_one_resonant_mode(self, triple_profiles):
        """The analogous branch-I bound fails for the actual solution: the
        resonant slow mode e^{-gammaI_{j,k} x} carries a small but
        grid-converged coefficient, so the honest tail rate is the smallest
        present mode, not sqrt(c_l) - gammaI_{j,k}."""
        pair, t_i, _ = triple_profiles
        slow = min(t_i.base.rates.gammaI, t_i.base.rates.gammaII)
        slope = t_i.base.right_log_slope(30.0, 50.0)
        assert slope <= -slow + 1e-2          # honest bound holds
        claimed = 1.0 - pair.gammaI
        assert slope > -claimed + 1e-2        # claimed bound does not
        # the violating coefficient is real: stable under refinement
        coarse = R.triple_profile(0.8, 1.0, 1.0, "I")
        assert abs(coarse.aII - t_i.aII) / abs(t_i.aII) < 1e-2
        assert abs(t_i.aII) > 1e-3

    def test_l_ordering_enforced(self):
        with pytest.raises(ValueError):
            R.triple_profile(1.0, 0.8, 0.9, "I")  # c_l <= c_j

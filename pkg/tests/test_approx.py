"""Approximate solution assembly, residual rates and tail structure."""

import numpy as np
import pytest

from gkdv4 import approx as A
from gkdv4 import profiles as P
from gkdv4.grids import Grid, fd1
from gkdv4.rigidity import SolitonTrain


class TestModelAssembly:
    def test_counts_two_solitons(self, model_two_soliton):
        m = model_two_soliton
        assert sorted(m.pair_profiles) == [(1, 2), (2, 1)]
        assert sorted(m.triple_profiles) == [(2, 1, 1, "I"), (2, 1, 1, "II")]

    def test_counts_three_solitons(self, model_three_soliton):
        m = model_three_soliton
        assert len(m.pair_profiles) == 6
        assert len(m.triple_profiles) == 12  # {(j,k,l): j!=k, l<j} x 2 branches

    def test_speed_condition_required(self):
        with pytest.raises(ValueError):
            A.build_model(SolitonTrain((1.0, 0.7)))

    def test_coefficient_decay_law(self, model_two_soliton):
        m = model_two_soliton
        s0 = m.geometry.sigma0
        # log z_{1,2} slope is exactly -sqrt(c_2)(c_1 - c_2) = -sigma0
        z10, z20 = m.z_pair(1, 2, 10.0), m.z_pair(1, 2, 20.0)
        assert np.log(z20 / z10) / 10.0 == pytest.approx(-s0, rel=1e-12)
        # triple coefficients decay at least as fast
        for key in m.triple_profiles:
            assert m.z_triple_rate(*key) >= s0 - 1e-12


class TestEvaluation:
    def test_far_field_tiny(self, model_two_soliton):
        v = model_two_soliton.evaluate(0.0, np.array([-150.0, 150.0]))
        vmax = abs(model_two_soliton.evaluate(0.0, 10.0))
        assert np.max(np.abs(v)) < 1e-10 * vmax

    def test_converges_to_leading_soliton(self, model_two_soliton):
        m = model_two_soliton
        s0 = m.geometry.sigma0
        xi = np.linspace(-10.0, 10.0, 201)
        errs = []
        for t in (30.0, 45.0):
            v = m.evaluate(t, xi + m.y(1, t))
            errs.append(np.max(np.abs(v - P.q(xi))))
        # error itself decays at rate ~sigma0
        assert errs[0] < 1.0
        assert np.log(errs[0] / errs[1]) / 15.0 == pytest.approx(s0, rel=0.2)

    def test_tower_matches_finite_differences(self, model_two_soliton):
        g = Grid.from_spacing(-20.0, 80.0, 0.01)
        tw = model_two_soliton.v_tower(20.0, g.x, 2)
        d1 = fd1(tw["V"][0], g.h)
        assert np.max(np.abs(d1[5:-5] - tw["V"][1][5:-5])) < 1e-6
        d2 = fd1(tw["V"][1], g.h)
        assert np.max(np.abs(d2[5:-5] - tw["V"][2][5:-5])) < 1e-6

    def test_q_tower_against_closed_forms(self):
        x = np.linspace(-10.0, 10.0, 2001)
        tw = A.q_tower(x, 3)
        assert np.max(np.abs(tw[1] - P.q_prime(x))) < 1e-14
        assert np.max(np.abs(tw[2] - P.q_second(x))) < 1e-14
        assert np.max(np.abs(tw[3] - P.q_third(x))) < 1e-14


class TestErrorTerms:
    def test_e1_binomial_identity(self, model_two_soliton):
        # for N = 2, E1 = 6 R1^2 R2^2 exactly
        m = model_two_soliton
        t = 12.0
        g = A.evaluation_grid(m, t, h=0.05)
        terms = A.error_terms(m, t, g, orders=0)
        r1 = P.soliton_profile(1.0, g.x - m.y(1, t))
        r2 = P.soliton_profile(0.8, g.x - m.y(2, t))
        direct = 6.0 * r1 ** 2 * r2 ** 2
        assert np.max(np.abs(terms["E1"]["tower"][0] - direct)) < 1e-13

    def test_bookkeeping_identity(self, model_two_soliton):
        for t in (12.0, 25.0):
            assert A.residual_vs_terms(model_two_soliton, t) < 1e-8

    def test_residual_and_term_rates(self, model_two_soliton):
        m = model_two_soliton
        s0 = m.geometry.sigma0
        fit = A.decay_rate_fit(m, np.linspace(10.0, 30.0, 11))
        assert abs(fit["residual_slope"] + 2.0 * s0) <= 0.02
        for name in ("E1", "E2", "E3", "E4", "E5"):
            assert fit[f"{name}_slope"] <= -2.0 * s0 + 0.02

    def test_v_minus_r_rate(self, model_two_soliton):
        m = model_two_soliton
        slope = A.v_minus_r_slope(m, np.linspace(10.0, 30.0, 11))
        assert abs(slope + m.geometry.sigma0) <= 0.02

    def test_separated_solitons_tiny_residual(self, model_two_soliton):
        # once the interaction terms are below floor the residual is too
        res = A.residual_E(model_two_soliton, 120.0)
        assert res["h3_norm"] < 1e-8


class TestLowerBound:
    @pytest.fixture(scope="class")
    def report(self, model_two_soliton):
        return A.lower_bound_check(model_two_soliton,
                                   np.linspace(60.0, 120.0, 13), delta_k0=5.0)

    def test_bracket_positive_and_tight(self, report):
        assert report.kappa_lo > 0.0
        assert report.variation < 0.2

    def test_k0_scaling(self, report, model_two_soliton):
        assert report.k0_scaling_error < 0.02

    def test_soliton_and_triple_parts_subdominant(self, report):
        assert report.dominance_max < 0.1

    def test_soliton_line_decay(self, report, model_two_soliton):
        s0 = model_two_soliton.geometry.sigma0
        assert report.r_line_slope <= -2.0 * s0 - 0.1 + 0.01

    def test_z_tail_additivity(self, model_two_soliton):
        kappa = A.z_tail_additivity(model_two_soliton, [40.0, 60.0], [30.0, 50.0])
        assert kappa > 0.0

    def test_z_tail_additivity_three(self, model_three_soliton):
        kappa = A.z_tail_additivity(model_three_soliton, [60.0, 80.0], [40.0, 60.0])
        assert kappa > 0.0


class TestThreeSolitonStructure:
    def test_residual_finite_and_identity_holds(self, model_three_soliton):
        m = model_three_soliton
        assert A.residual_vs_terms(m, 25.0) < 1e-7
        res = A.residual_E(m, 25.0)
        assert np.isfinite(res["h3_norm"])

    def test_pair_tail_signs_uniform(self, model_three_soliton):
        m = model_three_soliton
        signs = {np.sign(m.pair_profiles[(j, k)].aI)
                 for (j, k) in m.pair_keys() if j < k}
        assert len(signs) == 1

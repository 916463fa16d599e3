"""Closed-form profile algebra, quadrature and the linearized operator."""

import numpy as np
import pytest

from gkdv4 import profiles as P
from gkdv4.grids import (DomainTooSmallError, Grid, SampledField,
                         TailNotDecayedWarning, cumulative_from_zero, fd1,
                         fd2, fd3, integrate)

from conftest import richardson_trapezoid


class TestGrid:
    def test_samples_exact(self):
        g = Grid(-2.0, 2.0, 17)
        assert g.h == 0.25
        assert np.allclose(g.x, -2.0 + 0.25 * np.arange(17), atol=0)

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            Grid(0.0, 1.0, 8)

    def test_field_validation(self):
        g = Grid(-1.0, 1.0, 21)
        with pytest.raises(ValueError):
            SampledField(g, np.zeros(20))
        with pytest.raises(ValueError):
            SampledField(g, np.full(21, np.nan))


class TestClosedForms:
    def test_q_at_zero(self):
        assert P.q(0.0) == pytest.approx((2.5) ** (1.0 / 3.0), abs=1e-15)

    def test_q_even(self):
        x = np.linspace(0.0, 30.0, 301)
        assert np.max(np.abs(P.q(x) - P.q(-x))) < 1e-15

    def test_soliton_scaling(self):
        # Q_c(0) = c^(1/3) Q(0)
        assert P.soliton_profile(4.0, 0.0) == pytest.approx(
            4.0 ** (1.0 / 3.0) * 2.5 ** (1.0 / 3.0), rel=1e-14)

    def test_soliton_rejects_bad_speed(self):
        with pytest.raises(ValueError):
            P.soliton_profile(0.0, 1.0)
        with pytest.raises(ValueError):
            P.soliton_profile(-1.0, 1.0)

    def test_gradient_identity_pointwise(self):
        # (Q')^2 = Q^2 - (2/5) Q^5 from the profile equation
        x = np.linspace(-40.0, 40.0, 16001)
        q, qp = P.q(x), P.q_prime(x)
        assert np.max(np.abs(qp ** 2 - (q ** 2 - 0.4 * q ** 5))) < 1e-12

    def test_q_overflow_safe(self):
        assert P.q(5000.0) == 0.0 or P.q(5000.0) < 1e-300
        assert np.isfinite(P.q_prime(5000.0))

    def test_cutoff_derivative_bound(self):
        x = np.linspace(-30.0, 30.0, 6001)
        assert np.all(P.phi_third(x) <= P.phi_prime(x) + 1e-15)

    def test_cutoff_limits(self):
        assert P.phi(-800.0) == pytest.approx(0.0, abs=1e-15)
        assert P.phi(800.0) == pytest.approx(1.0, abs=1e-15)

    def test_weight_positivity(self):
        x = np.linspace(-40.0, 40.0, 8001)
        f0 = P.f0_weight(x)
        assert np.all(f0 > 0)
        assert np.all(f0 * P.q(x) >= P.F0_COEFF - 1e-12)


class TestDifferentiation:
    def test_fd_against_closed_forms(self, vgrid):
        x = vgrid.x
        q = P.q(x)
        assert np.max(np.abs(fd1(q, vgrid.h) - P.q_prime(x))[5:-5]) < 1e-8
        assert np.max(np.abs(fd2(q, vgrid.h) - P.q_second(x))[5:-5]) < 1e-8
        assert np.max(np.abs(fd3(q, vgrid.h) - P.q_third(x))[5:-5]) < 1e-6

    def test_fourth_order_convergence(self):
        errs = []
        for h in (0.02, 0.01):
            g = Grid.from_spacing(-20.0, 20.0, h)
            err = np.abs(fd2(P.q(g.x), h) - P.q_second(g.x))[5:-5].max()
            errs.append(err)
        assert errs[0] / errs[1] >= 12.0  # ~16 for a 4th-order stencil


class TestQuadrature:
    def test_integral_ratios(self, vgrid):
        base = P.base_integrals(vgrid)
        assert abs(base["int_qp2"] / base["int_q2"] - 3.0 / 7.0) < 1e-8
        x, h = vgrid.x, vgrid.h
        q = P.q(x)
        ratio_lam = np.trapezoid(q * P.lam_q(x), dx=h) / base["int_q2"]
        assert abs(ratio_lam - 1.0 / 12.0) < 1e-8
        h0 = P.h0_profile(vgrid)
        ratio_h0 = np.trapezoid(q * h0.values, dx=h) / base["int_q"]
        assert abs(ratio_h0 - 1.0 / 6.0) < 1e-8

    def test_int_q_against_oracle(self, vgrid):
        coarse, fine, extrap = richardson_trapezoid(P.q, -40.0, 40.0, 0.005)
        assert abs(coarse - fine) < 1e-10
        assert abs(P.base_integrals(vgrid)["int_q"] - extrap) < 1e-10

    def test_energy_identity(self, vgrid):
        # E(Q) = int (Q')^2 - (2/5) int Q^5 = -(1/7) int Q^2
        base = P.base_integrals(vgrid)
        assert base["energy_q"] == pytest.approx(-base["int_q2"] / 7.0, rel=1e-10)

    def test_tail_warning(self):
        g = Grid.from_spacing(-2.0, 2.0, 0.1)
        with pytest.warns(TailNotDecayedWarning):
            integrate(SampledField(g, P.q(g.x)))

    def test_cumulative_parity(self, vgrid):
        q2 = P.q(vgrid.x) ** 2
        i_q2 = cumulative_from_zero(vgrid, q2, 2.0 * P.q(vgrid.x) * P.q_prime(vgrid.x))
        # integral of an even function from 0 is odd
        assert np.max(np.abs(i_q2 + i_q2[::-1])) < 1e-12


class TestBoundedProfiles:
    def test_h0_at_zero(self, vgrid):
        h0 = P.h0_profile(vgrid)
        i0 = vgrid.index_of(0.0)
        assert h0.values[i0] == pytest.approx(-2.0 / 3.0, abs=1e-12)

    def test_h0_far_field(self, vgrid):
        h0 = P.h0_profile(vgrid)
        x = vgrid.x
        far = np.abs(x) >= 20.0
        assert np.max(np.abs(h0.values[far] - 1.0)) < 1e-6

    def test_h0_needs_wide_grid(self):
        with pytest.raises(DomainTooSmallError):
            P.h0_profile(Grid.from_spacing(-10.0, 10.0, 0.01))

    def test_j0_far_field_and_parity(self, vgrid):
        j0 = P.j0_profile(vgrid)
        base = P.base_integrals(vgrid)
        x = vgrid.x
        far = np.abs(x) >= 20.0
        assert np.max(np.abs(j0.values[far] - 1.0 / (2.0 * base["int_q"]))) < 1e-6
        assert np.max(np.abs(j0.values - j0.values[::-1])) < 1e-10


class TestLinearizedOperator:
    """The four operator identities at one resolution (h = 0.005, |x|<=15)."""

    @pytest.fixture()
    def setup(self, vgrid):
        x = vgrid.x
        mask = np.abs(x) <= 15.0
        return vgrid, x, mask

    def test_kernel_direction(self, setup):
        g, x, mask = setup
        lqp = P.apply_L(1.0, SampledField(g, P.q_prime(x)))
        assert np.max(np.abs(lqp.values[mask])) < 1e-6

    def test_scaling_direction(self, setup):
        g, x, mask = setup
        llam = P.apply_L(1.0, SampledField(g, P.lam_q(x)))
        assert np.max(np.abs((llam.values + P.q(x))[mask])) < 1e-6

    def test_power_eigenfunction(self, setup):
        g, x, mask = setup
        q52 = P.q(x) ** 2.5
        lq52 = P.apply_L(1.0, SampledField(g, q52))
        assert np.max(np.abs((lq52.values + 5.25 * q52)[mask])) < 1e-6

    def test_h0_inverse(self, setup):
        g, x, mask = setup
        lh0 = P.apply_L(1.0, P.h0_profile(g))
        assert np.max(np.abs(lh0.values[mask] - 1.0)) < 1e-6

    def test_rejects_bad_speed(self, vgrid):
        with pytest.raises(ValueError):
            P.apply_L(-1.0, SampledField(vgrid, P.q(vgrid.x)))

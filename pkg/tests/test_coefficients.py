import numpy as np
import pytest

from nsbf import (
    SampledFunction,
    beta_at,
    beta_via_definition,
    beta_via_direct,
    coefficients_recurrent,
    formal_powers,
    gamma_at,
    gamma_via_direct,
    goursat_residuals,
    legendre_moment,
    make_grid,
    parse,
    particular_solution,
    sample,
)
from nsbf.coefficients import legendre_data

PI = np.pi


class TestLegendreMoments:
    def test_low_order_values(self):
        assert abs(legendre_moment(0, 0) - 2.0) < 1e-15
        assert abs(legendre_moment(1, 1) - 2 / 3) < 1e-15
        # independent oracle: P_2(y) y^2 = (3 y^4 - y^2)/2 integrates to 4/15
        assert abs(legendre_moment(2, 2) - (3 / 5 - 1 / 3)) < 1e-15

    def test_structural_zeros(self):
        assert legendre_moment(1, 2) == 0.0  # parity mismatch
        assert legendre_moment(3, 1) == 0.0  # k < j

    def test_against_quadrature(self):
        for j, k in ((2, 4), (3, 5), (4, 10), (5, 9)):
            poly = np.polynomial.legendre.Legendre.basis(j).convert(kind=np.polynomial.Polynomial)
            integrand = poly * np.polynomial.Polynomial([0] * k + [1])
            exact = integrand.integ()(1) - integrand.integ()(-1)
            assert abs(legendre_moment(j, k) - exact) < 1e-13

    def test_coefficient_table_identities(self):
        ld = legendre_data(30)
        for n in range(31):
            col = ld.l[:, n]
            assert abs(col.sum() - 1.0) < 1e-10 * 2**n / max(1, n)  # P_n(1) = 1
            assert abs(np.dot(np.arange(31), col) - n * (n + 1) / 2) < 1e-9 * 2**n


class TestRecurrentRoute:
    def test_unit_f_all_zero(self, zero_pot_unit_f):
        cs = zero_pot_unit_f.cs
        assert np.abs(cs.sigma_scaled).max() < 1e-14
        assert np.abs(cs.tau_scaled).max() < 1e-12

    def test_default_f_constant_kernel(self, zero_pot):
        # f = 1 + ix: sigma_0 = ix/2 and everything above vanishes
        cs = zero_pot.cs
        g = cs.grid
        assert np.abs(cs.sigma_scaled[0] - 0.5j * g.nodes).max() < 1e-13
        assert np.abs(cs.sigma_scaled[1:]).max() < 1e-12
        assert np.abs(cs.tau_scaled).max() < 1e-11

    def test_seed_values(self, paine1):
        cs, ps = paine1.cs, paine1.ps
        assert np.abs(cs.sigma_scaled[0] - (ps.f.values - 1) / 2).max() == 0
        seed_tau = (ps.f_prime.values - ps.h) / 2 - cs.q_cum.values / 4
        assert np.abs(cs.tau_scaled[0] - seed_tau).max() == 0

    def test_sigma_vanishes_at_origin(self, paine1):
        cs = paine1.cs
        assert np.abs(cs.sigma_scaled[:, 0]).max() == 0
        assert np.abs(cs.tau_scaled[:, 0]).max() == 0

    def test_sigma_derivative_vanishes_at_origin(self, paine1):
        # sigma_n(0) = sigma_n'(0) = 0: near 0 the functions start at least
        # quadratically, so the first-node value is O(x1^2) relative to scale
        cs = paine1.cs
        x1 = cs.grid.nodes[1]
        for n in range(1, 6):
            first = abs(cs.sigma_scaled[n, 1])
            scale = np.abs(cs.sigma_scaled[n]).max()
            assert first <= 10 * scale * (x1 / cs.grid.b) ** 2

    def test_goursat_sum(self, paine1):
        # the plain beta sum reproduces h/2 + (1/2) int q at x = b
        eps1, eps2 = goursat_residuals(paine1.cs, PI, paine1.cs.N)
        assert eps1 < 1e-9
        assert eps2 < 1e-9

    def test_beta_decay(self, paine1):
        mags = np.abs(paine1.cs.beta_boundary())
        assert mags[30:].max() < 1e-3 * mags[:10].max()


class TestCrossRoutes:
    def test_definition_matches_recurrent(self, paine1):
        # the definition route's roundoff amplification grows ~2^k, so the
        # agreement threshold relaxes from 1e-10 (k <= 8) to 1e-9 (k <= 10)
        cs, ps = paine1.cs, paine1.ps
        q = paine1.q
        powers = formal_powers(ps, 10)
        betas = beta_via_definition(ps, q, 10, powers=powers)
        half = cs.grid.n // 2
        for n in range(11):
            rec = cs.beta_values(n)
            diff = np.abs(betas[n].values[half:] - rec[half:]).max()
            assert diff < (1e-10 if n <= 8 else 1e-9), f"n = {n}: {diff}"

    def test_direct_low_orders(self, paine1):
        ps, q = paine1.ps, paine1.q
        powers = formal_powers(ps, 5)
        b0 = beta_via_direct(ps, q, 0, powers=powers)
        assert np.abs(b0.values - (ps.f.values - 1) / 2).max() < 1e-14
        b1_direct = beta_via_direct(ps, q, 1, powers=powers)
        b1_def = beta_via_definition(ps, q, 1, powers=powers)[1]
        assert np.abs(b1_direct.values - b1_def.values).max() < 1e-13

    def test_direct_matches_recurrent(self, paine1):
        ps, q, cs = paine1.ps, paine1.q, paine1.cs
        powers = formal_powers(ps, 5)
        b5 = beta_via_direct(ps, q, 5, powers=powers)
        rec = cs.beta_values(5)
        half = cs.grid.n // 2
        assert np.abs(b5.values[half:] - rec[half:]).max() < 1e-10

    def test_gamma_direct_zero_potential(self, zero_pot_unit_f):
        ps, q = zero_pot_unit_f.ps, zero_pot_unit_f.q
        for n in range(3):
            gn = gamma_via_direct(ps, q, n)
            assert np.abs(gn.values).max() < 1e-12

    def test_gamma_direct_seed(self, paine1):
        # gamma_0 equals the recurrent seed (f' - h)/2 - (1/4) int q
        ps, q, cs = paine1.ps, paine1.q, paine1.cs
        g0 = gamma_via_direct(ps, q, 0)
        seed = (ps.f_prime.values - ps.h) / 2 - cs.q_cum.values / 4
        assert np.abs(g0.values[1:] - seed[1:]).max() < 1e-11

    def test_gamma_direct_matches_recurrent(self, paine1):
        ps, q, cs = paine1.ps, paine1.q, paine1.cs
        powers = formal_powers(ps, 5)
        half = cs.grid.n // 2
        for n in range(6):
            gd = gamma_via_direct(ps, q, n, powers=powers)
            rec = cs.gamma_values(n)
            assert np.abs(gd.values[half:] - rec[half:]).max() < 1e-8, f"n = {n}"


class TestPointAccess:
    def test_beta_at_origin_is_zero(self, paine1):
        for n in range(paine1.cs.N + 1):
            assert beta_at(paine1.cs, n, 0.0) == 0

    def test_beta_at_constant_kernel(self, zero_pot):
        cs = zero_pot.cs
        x = cs.grid.nodes[1000]
        assert abs(beta_at(cs, 0, x) - 0.5j * x) < 1e-13

    def test_gamma_at_origin_extrapolates(self, paine1):
        val = gamma_at(paine1.cs, 0, 0.0)
        # gamma_0(x) -> q(0) x / 4 near 0, so the extrapolated origin value is small
        assert abs(val) < 1e-3

    def test_bounds_checked(self, paine1):
        with pytest.raises(ValueError):
            beta_at(paine1.cs, paine1.cs.N + 1, PI)
        with pytest.raises(ValueError):
            gamma_at(paine1.cs, -1, PI)

    def test_unscaled_accessors(self, zero_pot):
        cs = zero_pot.cs
        sig0 = cs.sigma(0)
        assert np.abs(sig0.values - (zero_pot.ps.f.values - 1) / 2).max() == 0
        sig2 = cs.sigma(2)
        assert np.abs(sig2.values).max() < 1e-10

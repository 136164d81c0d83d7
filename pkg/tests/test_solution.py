import cmath

import numpy as np
import pytest

from nsbf import ConfigError, NsbfSolver, NumericalError, goursat_residuals
from oracles import ode_basis_values, second_derivative_5pt

PI = np.pi


def q_exp(t):
    return np.exp(t)


class TestTrivialPotential:
    def test_pure_trig_with_unit_f(self, zero_pot_unit_f):
        solver = zero_pot_unit_f.solver
        for om in (0.7, 3.0, 11.0):
            for x in (PI / 2, PI):
                vals = solver.eval_basis(om, x)
                assert abs(vals.c - np.cos(om * x)) < 1e-13
                assert abs(vals.s - np.sin(om * x)) < 1e-13
                assert abs(vals.s_over_omega - np.sin(om * x) / om) < 1e-13
                assert abs(vals.c_prime + om * np.sin(om * x)) < 1e-12
                assert abs(vals.s_prime - om * np.cos(om * x)) < 1e-12

    def test_omega_derivatives_unit_f(self, zero_pot_unit_f):
        solver = zero_pot_unit_f.solver
        om, x = 2.0, PI
        dc, ds = solver.eval_omega_derivatives(om, x)
        assert abs(dc + x * np.sin(om * x)) < 1e-12
        assert abs(ds - x * np.cos(om * x)) < 1e-12


class TestOmegaZero:
    def test_c_reduces_to_f(self, paine1):
        solver = paine1.solver
        for x in (PI / 2, PI):
            vals = solver.eval_basis(0.0, x)
            assert abs(vals.c - paine1.ps.f(x)) < 1e-10 * max(1, abs(paine1.ps.f(x)))
            assert vals.s == 0
            assert abs(vals.c_prime - paine1.ps.f_prime(x)) < 1e-9 * max(1, abs(paine1.ps.f_prime(x)))

    def test_regularized_quotient_solves_ivp(self, paine1):
        # s/omega at omega = 0 is the solution with data (0, 1): oracle by
        # direct adaptive integration
        solver = paine1.solver
        _, _, S, Sp = ode_basis_values(q_exp, PI, 0.0)
        vals = solver.eval_basis(0.0, PI)
        assert abs(vals.s_over_omega - S) < 1e-9 * max(1, abs(S))
        assert abs(vals.s_prime_over_omega - Sp) < 1e-8 * max(1, abs(Sp))

    def test_initial_node(self, paine1):
        vals = paine1.solver.eval_basis(3.7, 0.0)
        assert vals.c == 1
        assert vals.s == 0
        assert vals.s_over_omega == 0
        assert vals.c_prime == paine1.ps.h
        assert vals.s_prime == 3.7
        assert vals.s_prime_over_omega == 1


class TestAgainstOde:
    @pytest.mark.parametrize("om", [1.0, 10.0, 25.0])
    def test_solution_values(self, paine1, om):
        solver = paine1.solver
        C, Cp, S, Sp = ode_basis_values(q_exp, PI, om)
        h = paine1.ps.h
        vals = solver.eval_basis(om, PI)
        eps1, eps2 = goursat_residuals(paine1.cs, PI, solver.N_active)
        # the estimate |c - c_N| <= 2 x eps holds with the true kernel error;
        # the Goursat residuals are endpoint proxies, hence the slack factor
        budget = max(10 * 2 * PI * max(eps1, eps2), 1e-11)
        c_exact = C + h * S
        cp_exact = Cp + h * Sp
        assert abs(vals.c - c_exact) < budget
        assert abs(vals.c_prime - cp_exact) < budget * max(1.0, om)
        assert abs(vals.s_over_omega - S) < budget
        assert abs(vals.s_prime_over_omega - Sp) < budget * max(1.0, om)

    def test_high_frequency(self, paine1):
        # omega = 100: the truncation bound is omega-independent, so the
        # error stays at the kernel-residual level
        om = 100.0
        C, Cp, S, Sp = ode_basis_values(q_exp, PI, om)
        h = paine1.ps.h
        vals = paine1.solver.eval_basis(om, PI)
        assert abs(vals.c - (C + h * S)) < 1e-8
        assert abs(vals.s_over_omega - S) < 1e-8
        assert abs(vals.c_prime - (Cp + h * Sp)) < 1e-6  # derivative scale ~ omega

    def test_complex_omega(self, paine1):
        om = 2.0 + 1.5j
        C, Cp, S, Sp = ode_basis_values(q_exp, PI, om)
        vals = paine1.solver.eval_basis(om, PI)
        c_exact = C + paine1.ps.h * S
        assert abs(vals.c - c_exact) < 1e-9 * max(1, abs(c_exact))
        assert abs(vals.s / om - S) < 1e-9 * max(1, abs(S))


class TestOmegaDerivatives:
    @pytest.mark.parametrize("om", [0.5, 3.0, 20.0])
    def test_against_finite_differences(self, paine1, om):
        solver = paine1.solver
        d = 1e-6 * max(1.0, om)
        vp = solver.eval_basis(om + d, PI)
        vm = solver.eval_basis(om - d, PI)
        dc, ds = solver.eval_omega_derivatives(om, PI)
        fd_c = (vp.c - vm.c) / (2 * d)
        fd_s = (vp.s - vm.s) / (2 * d)
        assert abs(dc - fd_c) < 1e-6 * max(1.0, abs(fd_c))
        assert abs(ds - fd_s) < 1e-6 * max(1.0, abs(fd_s))

    def test_even_series_limit(self, paine1):
        # c is even in omega, so dc/domega -> 0 as omega -> 0; the approach
        # is linear with slope set by the curvature (~ 2 beta_0 x^2 / 3)
        dc0, _ = paine1.solver.eval_omega_derivatives(0.0, PI)
        assert dc0 == 0
        curvature = 2 * abs(paine1.cs.beta_boundary()[0]) * PI**2
        dc, _ = paine1.solver.eval_omega_derivatives(1e-9, PI)
        assert abs(dc) < 10 * curvature * 1e-9


class TestSymmetry:
    def test_even_odd_in_omega(self, paine1):
        solver = paine1.solver
        for om in (0.3, 4.0, 17.0):
            plus = solver.eval_basis(om, PI)
            minus = solver.eval_basis(-om, PI)
            scale = max(1.0, abs(plus.c), abs(plus.s))
            assert abs(plus.c - minus.c) < 1e-12 * scale
            assert abs(plus.s + minus.s) < 1e-12 * scale


class TestKernels:
    def test_constant_kernel(self, zero_pot):
        solver = zero_pot.solver
        g = solver.grid
        for x in (g.nodes[500], g.nodes[1500], g.nodes[-1]):
            for t in (-x, -x / 3, 0.0, x / 2, x):
                tt = x * round(t / x * 8) / 8 if x else 0.0
                val = solver.eval_kernel(x, tt)
                assert abs(val - 0.5j) < 1e-11

    def test_goursat_boundary_values(self, paine1):
        solver = paine1.solver
        cs = paine1.cs
        Q = complex(cs.q_cum.values[-1])
        eps1, eps2 = goursat_residuals(cs, PI, solver.N_active)
        assert abs(solver.eval_kernel(PI, PI) - (cs.h / 2 + Q / 2)) <= eps1 * 1.0000001
        assert abs(solver.eval_kernel(PI, -PI) - cs.h / 2) <= eps2 * 1.0000001

    def test_kernel1_boundary_values(self, paine1):
        solver = paine1.solver
        cs = paine1.cs
        Q = complex(cs.q_cum.values[-1])
        target = 0.25 * (complex(cs.q.values[0]) + cs.h * Q)
        assert abs(solver.eval_kernel1(PI, -PI) - target) < 1e-8

    def test_domain_checks(self, paine1):
        with pytest.raises(ConfigError):
            paine1.solver.eval_kernel(PI, 1.1 * PI)
        with pytest.raises(ConfigError):
            paine1.solver.eval_kernel(0.0, 0.0)


class TestSeriesBehavior:
    def test_ode_residual(self, paine1):
        # -c'' + q c = omega^2 c checked by second differences on the grid
        cs = paine1.cs
        grid = cs.grid
        qv = paine1.q.values
        for om in (1.0, 10.0):
            c_vals, _ = paine1.solver.eval_profile(om)
            second = second_derivative_5pt(c_vals, grid.spacing)
            resid = -second + (qv * c_vals)[2:-2] - om**2 * c_vals[2:-2]
            tol = 1e-6 * max(1.0, om**2) * max(1.0, np.abs(c_vals).max())
            assert np.abs(resid).max() < tol

    def test_exponential_convergence_in_N(self, paine1):
        # past 2N > omega b the truncation error drops at least geometrically
        om = 5.0
        C, _, S, _ = ode_basis_values(q_exp, PI, om)
        exact = C + paine1.ps.h * S
        errs = []
        for N in (10, 14, 18, 22, 26):
            solver = NsbfSolver(paine1.cs, paine1.ps, N)
            errs.append(abs(solver.eval_basis(om, PI).c - exact))
        errs = np.array(errs)
        # overall collapse by orders of magnitude and mostly monotone decay
        assert errs[-1] < 1e-4 * errs[0]
        assert np.all(errs[1:] < errs[:-1] * 1.5)

    def test_off_grid_rejected(self, paine1):
        with pytest.raises(ConfigError):
            paine1.solver.eval_basis(1.0, 1.23456789)

    def test_bessel_overflow_propagates(self, paine1):
        with pytest.raises(NumericalError):
            paine1.solver.eval_basis(500j, PI)

    def test_profile_matches_pointwise(self, paine1):
        om = 7.0
        c_vals, s_over = paine1.solver.eval_profile(om)
        for i in (0, 123, 10000, 20000):
            vals = paine1.solver.eval_basis(om, paine1.grid.nodes[i])
            assert abs(c_vals[i] - vals.c) < 1e-12 * max(1, abs(vals.c))
            assert abs(s_over[i] - vals.s_over_omega) < 1e-12 * max(1, abs(vals.s_over_omega))

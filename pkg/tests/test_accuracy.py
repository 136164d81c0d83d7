import numpy as np
import pytest

from nsbf import (
    BoundaryCondition,
    SpectralProblem,
    assemble,
    goursat_residuals,
    kernel1_residuals,
    parse,
    select_N,
)
from nsbf.accuracy import residual_table, residual_table_csv

PI = np.pi


class TestResiduals:
    def test_constant_kernel_zero_residuals(self, zero_pot):
        cs = zero_pot.cs
        for N in (0, 5, 16):
            eps1, eps2 = goursat_residuals(cs, PI, N)
            d1, d2 = kernel1_residuals(cs, PI, N)
            assert eps1 < 1e-12 and eps2 < 1e-12
            assert d1 < 1e-12 and d2 < 1e-12

    def test_unit_f_zero_residuals(self, zero_pot_unit_f):
        eps1, eps2 = goursat_residuals(zero_pot_unit_f.cs, PI, 10)
        d1, d2 = kernel1_residuals(zero_pot_unit_f.cs, PI, 10)
        assert max(eps1, eps2, d1, d2) < 1e-12

    def test_paine1_plateau(self, paine1):
        cs = paine1.cs
        table = residual_table(cs, PI)
        worst = table[:, 1:].max(axis=1)
        # the curve falls by many orders and flattens out by N ~ 29
        assert worst[5] > 1e2 * worst[29]
        assert worst[29] < 1e-8
        assert worst[29:].max() < 10 * worst[29:].min()

    def test_monotone_early_decay(self, paine1):
        table = residual_table(paine1.cs, PI)
        eps1 = table[:, 1]
        assert eps1[24] < eps1[12] < eps1[6]

    def test_requires_interior_point(self, paine1):
        with pytest.raises(Exception):
            goursat_residuals(paine1.cs, 0.0, 5)


class TestSelectN:
    def test_constant_kernel_picks_zero(self, zero_pot):
        sel = select_N(zero_pot.cs, PI)
        assert sel.n_star == 0
        assert sel.residual < 1e-12

    def test_paine1_range(self, paine1):
        sel = paine1.selection
        assert 25 <= sel.n_star <= 40

    def test_paine2_range(self, paine2):
        sel = paine2.selection
        assert 60 <= sel.n_star <= 100

    def test_at_limit_warning(self):
        problem = SpectralProblem(parse("exp(x)"), PI, BoundaryCondition.dirichlet(),
                                  grid_n=2001, n_coeffs=8)
        asm = assemble(problem)
        sel = asm.selection
        assert sel.at_limit
        assert "larger coefficient count" in sel.warning

    def test_decay_rate_smooth_potential(self, paine1):
        # an analytic potential decays super-algebraically before the plateau
        table = residual_table(paine1.cs, PI)
        worst = table[:, 1:].max(axis=1)
        Ns = np.arange(6, 25)
        slope = np.polyfit(np.log(Ns), np.log(worst[6:25]), 1)[0]
        assert slope < -2.5

    def test_decay_rate_c2_potential(self):
        # q = |x - b/2|^3 is C^2: residuals should fall roughly like N^(-2.5)
        problem = SpectralProblem(parse("abs(x-1)^3"), 2.0, BoundaryCondition.dirichlet(),
                                  grid_n=5001, n_coeffs=64)
        asm = assemble(problem)
        table = residual_table(asm.cs, 2.0)
        worst = table[:, 1:].max(axis=1)
        Ns = np.arange(8, 60)
        slope = np.polyfit(np.log(Ns), np.log(worst[8:60]), 1)[0]
        # +-0.5 on the theoretical exponent, plus fitting allowance
        assert -2.5 - 1.1 < slope < -2.5 + 1.1


class TestTableExport:
    def test_csv_format(self, zero_pot):
        table = residual_table(zero_pot.cs, PI)
        text = residual_table_csv(table)
        lines = text.strip().splitlines()
        assert lines[0] == "N,eps1,eps2,d1,d2"
        assert len(lines) == zero_pot.cs.N + 2
        first = lines[1].split(",")
        assert first[0] == "0"
        assert all(float(v) < 1e-12 for v in first[1:])

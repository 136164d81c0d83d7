import math

import numpy as np
import pytest
from scipy.special import spherical_jn

from nsbf import NumericalError, legendre_sequence, spherical_j_over_z, spherical_j_sequence
from nsbf.special import _series_j, spherical_j_table


class TestSphericalBessel:
    def test_j0_at_half_pi(self):
        seq = spherical_j_sequence(math.pi / 2, 0)
        assert abs(seq.values[0] - 2 / math.pi) < 1e-15

    def test_zero_argument(self):
        seq = spherical_j_sequence(0.0, 5)
        assert np.allclose(seq.values, [1, 0, 0, 0, 0, 0], atol=1e-300)

    @pytest.mark.parametrize("x", [0.5, 5.0, 50.0])
    def test_normalization_identity(self, x):
        # sum (2n+1) j_n(x)^2 = 1
        nmax = 60 if x <= 5 else 90
        J = spherical_j_sequence(x, nmax).values
        total = np.sum((2 * np.arange(nmax + 1) + 1) * J**2)
        assert abs(total - 1.0) < 1e-12

    @pytest.mark.parametrize("x", [0.3, 5.0, 50.0, 314.0])
    def test_against_scipy_real(self, x):
        nmax = 60
        mine = spherical_j_sequence(x, nmax).values
        ref = spherical_jn(np.arange(nmax + 1), x)
        mask = np.abs(ref) > 1e-280
        assert np.abs(mine[mask] - ref[mask]).max() / np.abs(ref[mask]).max() < 1e-12

    @pytest.mark.parametrize("z", [3 + 2j, 50 + 0.5j, 55.4j, 0.02 + 0.01j, 250 - 1j])
    def test_recurrence_invariant_complex(self, z):
        # j_{k-1} + j_{k+1} = ((2k+1)/z) j_k, relative to 1e-12 where not underflowed
        nmax = 40
        J = spherical_j_sequence(z, nmax).values
        k = np.arange(1, nmax)
        res = J[k - 1] + J[k + 1] - (2 * k + 1) / z * J[k]
        scale = np.abs(J[k])
        mask = scale > 1e-280
        assert np.max(np.abs(res[mask]) / scale[mask]) < 1e-12

    def test_series_downward_overlap(self):
        # ascending series and CF-downward paths agree in the handover band
        import cmath

        from nsbf.special import _lentz_ratio

        for z in (2e-5, 1e-4 + 5e-5j, 3e-4, 1e-3):
            z = complex(z)
            nmax = 12
            a = _series_j(z, nmax)
            jj = np.empty(nmax + 1, dtype=complex)
            jj[nmax] = _lentz_ratio(z, nmax)
            jj[nmax - 1] = 1.0
            for k in range(nmax - 1, 0, -1):
                jj[k - 1] = (2 * k + 1) / z * jj[k] - jj[k + 1]
            big = jj * (cmath.sin(z) / z / jj[0])
            mask = np.abs(a) > 1e-280
            rel = np.abs(a[mask] - big[mask]) / np.abs(a[mask])
            assert rel.max() < 1e-11

    def test_magnitude_bound(self):
        # |j_n(z)| <= sqrt(pi) |z/2|^n e^{|Im z|} / Gamma(n + 3/2)
        for z in (2.0, 5 + 1j, 10 - 2j):
            J = spherical_j_sequence(z, 25).values
            for n in range(26):
                bound = (
                    math.sqrt(math.pi)
                    * abs(z / 2) ** n
                    * math.exp(abs(complex(z).imag))
                    / math.gamma(n + 1.5)
                )
                assert abs(J[n]) <= bound * (1 + 1e-10)

    def test_overflow_guard(self):
        with pytest.raises(NumericalError):
            spherical_j_sequence(800j, 10)

    def test_table_matches_scalar(self):
        zs = np.array([0.0, 5e-5, 0.3, 2 + 1j, 80.0, 120 - 0.4j])
        T = spherical_j_table(zs, 20)
        for i, z in enumerate(zs):
            ref = spherical_j_sequence(z, 20).values
            mask = np.abs(ref) > 1e-280
            if mask.any():
                assert np.abs(T[mask, i] - ref[mask]).max() / np.abs(ref[mask]).max() < 1e-12


class TestJOverZ:
    def test_matches_plain_ratio(self):
        for z in (0.5, 3 + 1j, 40.0):
            g = spherical_j_over_z(z, 15)
            J = spherical_j_sequence(z, 15).values
            assert np.abs(g - J / z).max() < 1e-15 * np.abs(J / z).max() + 1e-300

    def test_small_argument_limits(self):
        g = spherical_j_over_z(0.0, 5)
        assert abs(g[1] - 1 / 3) < 1e-15
        assert np.all(np.abs(g[2:]) == 0)
        g2 = spherical_j_over_z(1e-6, 5)
        assert abs(g2[1] - 1 / 3) < 1e-12

    def test_series_ratio_consistency(self):
        # the j/z series must equal the j series divided by z termwise
        for z in (1e-5, 5e-5 + 2e-5j, 9.9e-5):
            z = complex(z)
            g = spherical_j_over_z(z, 8)
            J = _series_j(z, 8)
            mask = np.abs(J[1:]) > 0
            rel = np.abs(g[1:][mask] - (J[1:] / z)[mask]) / np.abs((J[1:] / z)[mask])
            assert rel.max() < 1e-13


class TestLegendre:
    def test_endpoint_values(self):
        P = legendre_sequence(1.0, 12)
        assert np.allclose(P, 1.0, atol=1e-14)
        Pm = legendre_sequence(-1.0, 12)
        assert np.allclose(Pm, (-1.0) ** np.arange(13), atol=1e-14)

    def test_p2_midpoint(self):
        assert abs(legendre_sequence(0.5, 2)[2] - (-0.125)) < 1e-15

    def test_against_numpy(self):
        for t in (-0.7, 0.1, 0.9):
            P = legendre_sequence(t, 20)
            for n in (3, 10, 20):
                ref = np.polynomial.legendre.Legendre.basis(n)(t)
                assert abs(P[n] - ref) < 1e-13

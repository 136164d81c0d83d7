"""Truncated series evaluation: the basis solutions, their derivatives, and kernels.

For a truncation order N the evaluations are

    c_N  = cos(wx) + 2 sum (-1)^n beta_{2n}(x)  j_{2n}(wx)
    s_N  = sin(wx) + 2 sum (-1)^n beta_{2n+1}(x) j_{2n+1}(wx)
    c*_N = -w sin(wx) + (h + Q/2) cos(wx) + 2 sum (-1)^n gamma_{2n}(x) j_{2n}(wx)
    s*_N =  w cos(wx) + (Q/2) sin(wx)    + 2 sum (-1)^n gamma_{2n+1}(x) j_{2n+1}(wx)

with Q = int_0^x q.  The quotients s_N/w and s*_N/w are evaluated directly
(termwise via j_k(z)/z) so they stay finite and smooth through w = 0, which
keeps the characteristic function regular there.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .coefficients import CoefficientSet, _unscale_ratio
from .errors import ConfigError
from .special import legendre_sequence, spherical_j_over_z, spherical_j_sequence, spherical_j_table
from .spps import ParticularSolution

__all__ = ["NsbfSolver", "SolutionValues"]

_SMALL_Z = 1e-4


@dataclass(frozen=True)
class SolutionValues:
    """Values of the truncated representations at one (omega, x)."""

    c: complex
    s: complex
    s_over_omega: complex
    c_prime: complex
    s_prime: complex
    s_prime_over_omega: complex


class NsbfSolver:
    """Evaluator bound to a coefficient set and a truncation order.

    Evaluation points x must be grid nodes (the coefficients are
    grid-sampled; off-node evaluation would silently add an interpolation
    error model the series does not account for).
    """

    def __init__(self, cs: CoefficientSet, ps: ParticularSolution, n_active: int | None = None):
        if n_active is None:
            n_active = cs.N
        if not 1 <= n_active <= cs.N:
            raise ConfigError(f"N_active = {n_active} outside 1..{cs.N}")
        self.cs = cs
        self.ps = ps
        self.grid = cs.grid
        self.N_active = int(n_active)
        self.h = cs.h

        N = self.N_active
        self._even = np.arange(0, N + 1, 2)
        self._odd = np.arange(1, N + 1, 2)
        self._sign_even = (-1.0) ** (self._even // 2)
        self._sign_odd = (-1.0) ** (self._odd // 2)
        # boundary coefficient vectors, cached: the spectral search evaluates
        # everything at x = b
        self._node_cache = {}
        self._profile_beta = None

    # -- coefficient access -------------------------------------------------

    def _vectors_at(self, i: int):
        """(beta_j(x_i), gamma_j(x_i), Q(x_i)) for j = 0..N_active, cached."""
        hit = self._node_cache.get(i)
        if hit is not None:
            return hit
        cs = self.cs
        N = self.N_active
        if i == cs.grid.n - 1:
            beta = cs.sigma_scaled[: N + 1, -1]
            gamma = cs.tau_scaled[: N + 1, -1]
        else:
            beta = np.array([_unscale_ratio(cs.sigma_scaled[n], n, cs.grid)[i] for n in range(N + 1)])
            gamma = np.array([_unscale_ratio(cs.tau_scaled[n], n, cs.grid)[i] for n in range(N + 1)])
        Q = complex(cs.q_cum.values[i])
        entry = (beta, gamma, Q)
        if len(self._node_cache) < 64:
            self._node_cache[i] = entry
        return entry

    # -- point evaluation ---------------------------------------------------

    def eval_basis(self, omega: complex, x: float) -> SolutionValues:
        """c_N, s_N, s_N/w and the x-derivatives at a grid node."""
        i = self.grid.index_of(x)
        omega = complex(omega)
        if i == 0:
            return SolutionValues(1.0 + 0j, 0j, 0j, self.h, omega, 1.0 + 0j)
        beta, gamma, Q = self._vectors_at(i)
        xv = self.grid.nodes[i]
        z = omega * xv
        N = self.N_active
        J = spherical_j_sequence(z, N).values
        g = spherical_j_over_z(z, N)
        be = beta[self._even] * self._sign_even
        bo = beta[self._odd] * self._sign_odd
        ge = gamma[self._even] * self._sign_even
        go = gamma[self._odd] * self._sign_odd

        cos_z = cmath.cos(z)
        sin_z = cmath.sin(z)
        sinc = sin_z / z if z != 0 else 1.0 + 0j

        c = cos_z + 2.0 * np.dot(be, J[self._even])
        s = sin_z + 2.0 * np.dot(bo, J[self._odd])
        s_over = xv * sinc + 2.0 * xv * np.dot(bo, g[self._odd])
        c_p = -omega * sin_z + (self.h + Q / 2.0) * cos_z + 2.0 * np.dot(ge, J[self._even])
        s_p = omega * cos_z + Q / 2.0 * sin_z + 2.0 * np.dot(go, J[self._odd])
        s_p_over = cos_z + Q / 2.0 * xv * sinc + 2.0 * xv * np.dot(go, g[self._odd])
        return SolutionValues(complex(c), complex(s), complex(s_over), complex(c_p), complex(s_p), complex(s_p_over))

    def eval_omega_derivatives(self, omega: complex, x: float) -> tuple[complex, complex]:
        """(dc_N/dw, ds_N/dw) at a grid node.

        The 2n/w and (2n+2)/w factors are evaluated as multiples of
        j_k(z)/z, so the w -> 0 limits are taken termwise.
        """
        i = self.grid.index_of(x)
        omega = complex(omega)
        if i == 0:
            return 0j, 0j
        beta, _, _ = self._vectors_at(i)
        xv = self.grid.nodes[i]
        z = omega * xv
        N = self.N_active
        J = spherical_j_sequence(z, N + 1).values
        g = spherical_j_over_z(z, N + 1)
        be = beta[self._even] * self._sign_even
        bo = beta[self._odd] * self._sign_odd

        sin_z = cmath.sin(z)
        cos_z = cmath.cos(z)
        # dc/dw: sum over even orders 2n of (2n/w) j_2n - x j_{2n+1};
        # the n = 0 factor vanishes, so the g entry at order 0 is never used
        even_terms = self._even * xv * g[self._even] - xv * J[self._even + 1]
        even_terms[0] = -xv * J[1]
        dc = -xv * sin_z + 2.0 * np.dot(be, even_terms)
        odd_terms = xv * J[self._odd - 1] - (self._odd + 1) * xv * g[self._odd]
        ds = xv * cos_z + 2.0 * np.dot(bo, odd_terms)
        return complex(dc), complex(ds)

    # -- kernels --------------------------------------------------------------

    def eval_kernel(self, x: float, t: float) -> complex:
        """K_N(x, t) = sum_j (beta_j(x)/x) P_j(t/x) on the triangle |t| <= x."""
        return self._kernel_sum(x, t, use_gamma=False)

    def eval_kernel1(self, x: float, t: float) -> complex:
        """K_{1,N}(x, t) = sum_j (gamma_j(x)/x) P_j(t/x)."""
        return self._kernel_sum(x, t, use_gamma=True)

    def _kernel_sum(self, x, t, use_gamma):
        i = self.grid.index_of(x)
        if i == 0:
            raise ConfigError("kernel evaluation needs x >= the first interior node")
        if abs(t) > x * (1 + 1e-12):
            raise ConfigError(f"|t| = {abs(t)} outside the kernel triangle |t| <= x = {x}")
        beta, gamma, _ = self._vectors_at(i)
        coeffs = gamma if use_gamma else beta
        xv = self.grid.nodes[i]
        P = legendre_sequence(min(1.0, max(-1.0, t / xv)), self.N_active)
        return complex(np.dot(coeffs, P) / xv)

    # -- whole-grid profiles (eigenfunction assembly) -------------------------

    def eval_profile(self, omega: complex) -> tuple[np.ndarray, np.ndarray]:
        """(c_N(w, x_i), (s_N/w)(w, x_i)) on the full grid, vectorized."""
        omega = complex(omega)
        grid = self.grid
        N = self.N_active
        if self._profile_beta is None:
            rows = [self.cs.beta_values(n) for n in range(N + 1)]
            self._profile_beta = np.array(rows)
        beta = self._profile_beta
        x = grid.nodes.astype(complex)
        z = omega * x
        J = spherical_j_table(z, N)
        with np.errstate(invalid="ignore", divide="ignore"):
            g = np.where(np.abs(z) > _SMALL_Z, J / np.where(z == 0, 1, z), 0.0)
        small = np.abs(z) <= _SMALL_Z
        if small.any():
            for i in np.flatnonzero(small):
                g[:, i] = spherical_j_over_z(z[i], N)
        c = np.cos(z)
        s_over = x * np.where(z == 0, 1.0, np.sin(np.where(z == 0, 1, z)) / np.where(z == 0, 1, z))
        for n in self._even:
            c = c + 2.0 * (-1.0) ** (n // 2) * beta[n] * J[n]
        for n in self._odd:
            s_over = s_over + 2.0 * (-1.0) ** (n // 2) * beta[n] * x * g[n]
        c[0] = 1.0
        s_over[0] = 0.0
        return c, s_over

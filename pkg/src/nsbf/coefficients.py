"""Series coefficients beta_n (sigma_n = x^n beta_n) and gamma_n (tau_n = x^n gamma_n).

Three construction routes:

* ``coefficients_recurrent`` -- the stable recurrent-integration procedure;
  the production default.
* ``beta_via_definition`` -- the parity-split recursion dividing by the
  Legendre moments p_kk; numerically unstable for large n (the moment ratio
  p_0k/p_kk grows like 2^{k+1}/sqrt(pi k), so early errors amplify
  exponentially) and retained for cross-validation.
* ``beta_via_direct`` / ``gamma_via_direct`` -- closed forms through the
  Legendre coefficient table; same instability caveat.

sigma_n and tau_n are stored internally scaled by b^-n: on long intervals the
unscaled functions overflow double precision (b^n with b = 100 and n > 154
exceeds the exponent range) while beta_n = sigma_n / x^n stays bounded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import lgamma, log, pi, sqrt, exp

import numpy as np

from .errors import NumericalError
from .grid import Grid, SampledFunction, cumulative_integral
from .spps import FormalPowers, ParticularSolution, formal_powers

__all__ = [
    "CoefficientSet",
    "LegendreData",
    "legendre_moment",
    "legendre_data",
    "coefficients_recurrent",
    "beta_via_definition",
    "beta_via_direct",
    "gamma_via_direct",
    "beta_at",
    "gamma_at",
]


def legendre_moment(j: int, k: int) -> float:
    """p_{j,k} = integral of P_j(y) y^k over [-1, 1].

    Zero when the parities of j and k differ or k < j; otherwise the Gamma
    closed form evaluated through log-Gamma to stay in range for k up to a
    few hundred.
    """
    if j < 0 or k < 0:
        raise ValueError("indices must be >= 0")
    if (j - k) % 2 != 0 or k < j:
        return 0.0
    m, n = j // 2, k // 2
    d = j % 2
    return sqrt(pi) * exp(
        lgamma(2 * n + 1 + d) - (2 * n + d) * log(2.0) - lgamma(n - m + 1) - lgamma(1.5 + n + m + d)
    )


@lru_cache(maxsize=8)
def _legendre_coeff_table(n_max: int) -> np.ndarray:
    """l[k, n]: coefficient of x^k in P_n, exact rationals cast to float."""
    polys = [[Fraction(1)], [Fraction(0), Fraction(1)]]
    for k in range(1, n_max):
        nxt = [Fraction(0)] * (k + 2)
        for i, c in enumerate(polys[k]):
            nxt[i + 1] += Fraction(2 * k + 1, k + 1) * c
        for i, c in enumerate(polys[k - 1]):
            nxt[i] -= Fraction(k, k + 1) * c
        polys.append(nxt)
    table = np.zeros((n_max + 1, n_max + 1))
    for n, p in enumerate(polys[: n_max + 1]):
        for k, c in enumerate(p):
            table[k, n] = float(c)
    return table


@dataclass(frozen=True)
class LegendreData:
    """Legendre coefficient table l_{k,n} and moment table p_{j,k} up to n_max."""

    n_max: int
    l: np.ndarray
    p: np.ndarray


def legendre_data(n_max: int) -> LegendreData:
    l = _legendre_coeff_table(n_max)
    p = np.zeros((n_max + 1, n_max + 1))
    for j in range(n_max + 1):
        for k in range(j, n_max + 1):
            p[j, k] = legendre_moment(j, k)
    return LegendreData(n_max, l, p)


@dataclass(frozen=True)
class CoefficientSet:
    """Families sigma_n = x^n beta_n and tau_n = x^n gamma_n up to order N.

    sigma_scaled[n] holds sigma_n / b^n sampled on the grid (tau likewise);
    use ``beta_at`` / ``gamma_at`` or the ``sigma``/``tau`` accessors rather
    than touching the raw arrays.
    """

    N: int
    grid: Grid
    sigma_scaled: np.ndarray = field(repr=False)
    tau_scaled: np.ndarray = field(repr=False)
    q: SampledFunction = field(repr=False)
    q_cum: SampledFunction = field(repr=False)
    h: complex
    route: str

    def __post_init__(self):
        self.sigma_scaled.setflags(write=False)
        self.tau_scaled.setflags(write=False)

    def sigma(self, n: int) -> SampledFunction:
        """Unscaled sigma_n; raises when b^n overflows the double range."""
        return SampledFunction(self.grid, self._unscale_row(self.sigma_scaled[n], n))

    def tau(self, n: int) -> SampledFunction:
        return SampledFunction(self.grid, self._unscale_row(self.tau_scaled[n], n))

    def _unscale_row(self, row, n):
        factor = self.grid.b**n
        if not np.isfinite(factor):
            raise NumericalError(f"sigma_{n} on b = {self.grid.b} overflows; use beta_at")
        return row * factor

    def beta_boundary(self) -> np.ndarray:
        """beta_n(b) for n = 0..N (exact: the scaling cancels at x = b)."""
        return self.sigma_scaled[:, -1].copy()

    def gamma_boundary(self) -> np.ndarray:
        return self.tau_scaled[:, -1].copy()

    def beta_values(self, n: int) -> np.ndarray:
        """beta_n at every node; 0 at x = 0 by continuity."""
        return _unscale_ratio(self.sigma_scaled[n], n, self.grid)

    def gamma_values(self, n: int) -> np.ndarray:
        """gamma_n at every node; x = 0 filled by 2-node linear extrapolation."""
        vals = _unscale_ratio(self.tau_scaled[n], n, self.grid)
        x1, x2 = self.grid.nodes[1], self.grid.nodes[2]
        vals[0] = vals[1] + (vals[2] - vals[1]) * (0.0 - x1) / (x2 - x1)
        return vals


def _unscale_ratio(scaled_row, n, grid):
    """beta/gamma_n(x) = scaled_row * (b/x)^n with a log-domain guard.

    Where (b/x)^n overflows but the scaled value is nonzero the product is
    finite and recovered through logs; a zero scaled value means the true
    coefficient is far below double range, so 0 is returned.
    """
    out = np.zeros(grid.n, dtype=complex)
    if n == 0:
        out[:] = scaled_row
        out[0] = scaled_row[0]
        return out
    x = grid.nodes
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        ratio = (grid.b / x[1:]) ** n
        prod = scaled_row[1:] * ratio
    bad = ~np.isfinite(prod)
    if bad.any():
        idx = np.flatnonzero(bad) + 1
        for i in idx:
            sv = scaled_row[i]
            if sv == 0:
                prod[i - 1] = 0.0
            else:
                lg = np.log(complex(sv)) + n * np.log(grid.b / x[i])
                if lg.real > 709.0:
                    raise NumericalError(f"coefficient {n} overflow at x = {x[i]}")
                prod[i - 1] = np.exp(lg)
    out[1:] = prod
    out[0] = 0.0  # beta_n(0) = 0 forced by the Fourier-Legendre integral
    return out


def beta_at(cs: CoefficientSet, n: int, x: float) -> complex:
    """beta_n(x) at a grid node; 0 at x = 0 by continuity."""
    if not 0 <= n <= cs.N:
        raise ValueError(f"n = {n} outside 0..{cs.N}")
    i = cs.grid.index_of(x)
    if n == 0:
        return complex(cs.sigma_scaled[0, i])
    if i == 0:
        return 0j
    return complex(_unscale_ratio(cs.sigma_scaled[n], n, cs.grid)[i])


def gamma_at(cs: CoefficientSet, n: int, x: float) -> complex:
    """gamma_n(x) at a grid node; x = 0 by linear extrapolation (heuristic)."""
    if not 0 <= n <= cs.N:
        raise ValueError(f"n = {n} outside 0..{cs.N}")
    i = cs.grid.index_of(x)
    return complex(cs.gamma_values(n)[i])


def coefficients_recurrent(ps: ParticularSolution, q: SampledFunction, N: int) -> CoefficientSet:
    """sigma_n, tau_n for n = 0..N by the recurrent integration procedure.

    Seeds: sigma_0 = (f-1)/2, tau_0 = (f'-h)/2 - (1/4) int q,
    sigma_1 = (3/2)(phi_1 - x), tau_1 = (3/2)((f' phi_1 + 1)/f - 1 - (x/2) int q).
    For n >= 2, with c_n = 2(2n-1):

        eta_n   = int_0^x (t f' + (n-1) f) sigma_{n-2} dt
        theta_n = int_0^x f^-2 (eta_n - t f sigma_{n-2}) dt
        sigma_n = (2n+1)/(2n-3) [x^2 sigma_{n-2} + c_n f theta_n]
        tau_n   = (2n+1)/(2n-3) [x^2 tau_{n-2} + c_n (f' theta_n + eta_n / f)
                                 - (c_n - 2n + 1) x sigma_{n-2}]
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    grid = q.grid
    b = grid.b
    x = grid.nodes
    f = ps.f.values
    fp = ps.f_prime.values
    h = ps.h
    q_cum = cumulative_integral(q)
    qc = q_cum.values
    xi = x / b

    sig = np.zeros((N + 1, grid.n), dtype=complex)
    tau = np.zeros_like(sig)
    sig[0] = (f - 1.0) / 2.0
    tau[0] = (fp - h) / 2.0 - qc / 4.0
    phi1 = f * cumulative_integral(SampledFunction(grid, 1.0 / f**2)).values
    sig[1] = 1.5 * (phi1 - x) / b
    tau[1] = 1.5 * ((fp * phi1 + 1.0) / f - 1.0 - x / 2.0 * qc) / b

    def cum(vals):
        return cumulative_integral(SampledFunction(grid, vals)).values

    for n in range(2, N + 1):
        cn = 2.0 * (2 * n - 1)
        eta = cum((x * fp + (n - 1) * f) * sig[n - 2]) / b
        theta = cum((eta - xi * f * sig[n - 2]) / f**2)
        fac = (2 * n + 1) / (2 * n - 3)
        sig[n] = fac * (xi**2 * sig[n - 2] + cn / b * f * theta)
        tau[n] = fac * (
            xi**2 * tau[n - 2] + cn / b * (fp * theta + eta / f) - (cn - 2 * n + 1) * xi * sig[n - 2] / b
        )
        if not (np.isfinite(sig[n]).all() and np.isfinite(tau[n]).all()):
            raise NumericalError(f"non-finite coefficient at level n = {n}")

    return CoefficientSet(N, grid, sig, tau, q, q_cum, h, "recurrent")


def _power_ratios(fp_obj: FormalPowers, grid: Grid, n: int):
    """phi_k(x)/x^k for k = 0..n as an array (k, node); node 0 column is the
    x -> 0 limit value 1 (unused: callers zero out node 0)."""
    x = grid.nodes
    out = np.empty((n + 1, grid.n), dtype=complex)
    out[0] = fp_obj.phi[0].values
    for k in range(1, n + 1):
        out[k, 1:] = fp_obj.phi[k].values[1:] / x[1:] ** k
        out[k, 0] = 1.0
    return out


def beta_via_definition(ps: ParticularSolution, q: SampledFunction, N: int,
                        powers: FormalPowers | None = None) -> list:
    """beta_0..beta_N by the parity-split Legendre-moment recursion.

    Documented-unstable route (exponential error growth in N); kept for
    cross-validation against the recurrent procedure.
    """
    grid = q.grid
    fp_obj = powers if powers is not None else formal_powers(ps, max(N, 1))
    ratios = _power_ratios(fp_obj, grid, N)
    ld = legendre_data(N)
    betas = np.empty((N + 1, grid.n), dtype=complex)
    betas[0] = (ps.f.values - 1.0) / 2.0
    if N >= 1:
        betas[1] = 1.5 * (ratios[1] - 1.0)
    for k in range(2, N + 1):
        acc = ratios[k] - 1.0
        for j in range(k % 2, k - 1, 2):
            acc = acc - ld.p[j, k] * betas[j]
        betas[k] = acc / ld.p[k, k]
    betas[1:, 0] = 0.0  # continuity limit at x = 0
    return [SampledFunction(grid, betas[k]) for k in range(N + 1)]


def beta_via_direct(ps: ParticularSolution, q: SampledFunction, n: int,
                    powers: FormalPowers | None = None) -> SampledFunction:
    """beta_n by the closed form (2n+1)/2 (sum_k l_{k,n} phi_k / x^k - 1)."""
    grid = q.grid
    fp_obj = powers if powers is not None else formal_powers(ps, max(n, 1))
    ratios = _power_ratios(fp_obj, grid, n)
    ld = legendre_data(n)
    acc = np.zeros(grid.n, dtype=complex)
    for k in range(n + 1):
        if ld.l[k, n] != 0.0:
            acc += ld.l[k, n] * ratios[k]
    vals = (2 * n + 1) / 2.0 * (acc - 1.0)
    vals[0] = 0.0
    return SampledFunction(grid, vals)


def gamma_via_direct(ps: ParticularSolution, q: SampledFunction, n: int,
                     powers: FormalPowers | None = None) -> SampledFunction:
    """gamma_n by the closed form through phi'_k.

    gamma_n = (2n+1)/2 (sum_k l_{k,n} phi'_k / x^k - n(n+1)/(2x)
              - (1/2) int_0^x q - (h/2)(1 + (-1)^n));
    the x = 0 value is filled by linear extrapolation from nodes 1 and 2.
    """
    grid = q.grid
    x = grid.nodes
    fp_obj = powers if powers is not None else formal_powers(ps, max(n, 1))
    ld = legendre_data(n)
    qc = cumulative_integral(q).values
    acc = np.zeros(grid.n, dtype=complex)
    for k in range(n + 1):
        if ld.l[k, n] == 0.0:
            continue
        term = np.empty(grid.n, dtype=complex)
        term[1:] = fp_obj.phi_prime[k].values[1:] / x[1:] ** k
        term[0] = 0.0
        acc += ld.l[k, n] * term
    vals = np.empty(grid.n, dtype=complex)
    vals[1:] = (2 * n + 1) / 2.0 * (
        acc[1:] - n * (n + 1) / (2.0 * x[1:]) - qc[1:] / 2.0 - ps.h / 2.0 * (1 + (-1) ** n)
    )
    vals[0] = vals[1] + (vals[2] - vals[1]) * (0.0 - x[1]) / (x[2] - x[1])
    return SampledFunction(grid, vals)

"""Particular solution of f'' = q f with f(0) = 1, and the formal powers.

The building blocks: a Picard iteration (iterated double cumulative
integration) produces the basis pair u, v of y'' = q y; the default
particular solution is f = u + i v, which cannot vanish for real-valued q
because u, v are then real with unit Wronskian.  The alternating-weight
recursive integrals on f feed the formal power systems phi_k / psi_k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .grid import SampledFunction, cumulative_integral

__all__ = ["ParticularSolution", "FormalPowers", "picard_pair", "particular_solution", "formal_powers"]

_OVERFLOW_LIMIT = 1e280


@dataclass(frozen=True)
class ParticularSolution:
    """Non-vanishing f with f(0) = 1, its derivative, and h = f'(0).

    min_abs is the minimum of |f| over the grid nodes; construction fails
    when it is below the vanishing threshold.
    """

    f: SampledFunction
    f_prime: SampledFunction
    h: complex
    min_abs: float

    @property
    def grid(self):
        return self.f.grid


@dataclass(frozen=True)
class FormalPowers:
    """phi_0..phi_K, psi_0..psi_K, phi' and the recursive integrals behind them."""

    phi: list
    psi: list
    phi_prime: list
    X: list
    X_tilde: list


def picard_pair(q: SampledFunction, max_iter: int = 200, tol: float = 1e-16):
    """Basis solutions of y'' = q y by iterated double integration.

    Returns (u, u', v, v') with u(0)=1, u'(0)=0, v(0)=0, v'(0)=1.  Stops when
    the sup norm of the latest series term falls below tol * max(1, ||u||,
    ||v||); raises NumericalError if that never happens within max_iter
    (interval length or potential too large for the series at this
    precision).
    """
    grid = q.grid
    one = SampledFunction(grid, np.ones(grid.n, dtype=complex))
    xsf = SampledFunction(grid, grid.nodes.astype(complex))

    u, u_prime = one, grid.zeros()
    v, v_prime = xsf, one
    term_u, term_v = one, xsf
    for _ in range(max_iter):
        su = cumulative_integral(q * term_u)
        term_u = cumulative_integral(su)
        u = u + term_u
        u_prime = u_prime + su

        sv = cumulative_integral(q * term_v)
        term_v = cumulative_integral(sv)
        v = v + term_v
        v_prime = v_prime + sv

        term_norm = max(term_u.max_abs(), term_v.max_abs())
        scale = max(1.0, u.max_abs(), v.max_abs())
        if not np.isfinite(term_norm):
            raise NumericalError("Picard iteration overflowed; interval or potential too large")
        if term_norm < tol * scale:
            return u, u_prime, v, v_prime
    raise NumericalError(
        f"Picard iteration did not converge in {max_iter} steps "
        "(interval length or potential norm too large for this precision)"
    )


def particular_solution(
    q: SampledFunction,
    override_f: SampledFunction | None = None,
    override_h: complex | None = None,
    vanish_tol: float = 1e-10,
) -> ParticularSolution:
    """Particular solution of f'' = q f, f(0) = 1.

    By default f = u + i v with h = u'(0) + i.  A user-supplied override_f
    (with its h = f'(0)) replaces it, e.g. when the default vanishes for a
    complex-valued q; the derivative is then reconstructed exactly from
    f' = h + integral of q f.
    """
    if override_f is not None:
        if override_h is None:
            raise NumericalError("override_f requires override_h = f'(0)")
        f = override_f
        if abs(f.values[0] - 1.0) > 1e-12:
            raise NumericalError(f"override f(0) = {f.values[0]}, expected 1")
        h = complex(override_h)
        f_prime = h + cumulative_integral(q * f)
    else:
        u, u_prime, v, v_prime = picard_pair(q)
        f = u + v * 1j
        f_prime = u_prime + v_prime * 1j
        h = complex(u_prime.values[0] + 1j)
    min_abs = float(np.abs(f.values).min())
    if min_abs < vanish_tol:
        raise NumericalError(
            f"particular solution vanishes on the grid (min |f| = {min_abs:.3e}); "
            "supply an override via the particular_solution configuration section"
        )
    return ParticularSolution(f, f_prime, h, min_abs)


def formal_powers(ps: ParticularSolution, K: int) -> FormalPowers:
    """Formal power systems phi_k, psi_k for k = 0..K.

    The recursive integrals weight f^2 and f^-2 alternately; phi'_k comes
    from the identity phi'_k = k psi_{k-1} + (f'/f) phi_k.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if ps.min_abs <= 0:
        raise NumericalError("formal powers need a non-vanishing f")
    grid = ps.grid
    one = SampledFunction(grid, np.ones(grid.n, dtype=complex))
    f, fp = ps.f, ps.f_prime
    f2 = f * f
    inv_f2 = 1.0 / f2

    X = [one]
    Xt = [one]
    for n in range(1, K + 1):
        X.append(cumulative_integral(X[n - 1] * (inv_f2 if n % 2 else f2)) * n)
        Xt.append(cumulative_integral(Xt[n - 1] * (f2 if n % 2 else inv_f2)) * n)
        peak = max(X[n].max_abs(), Xt[n].max_abs())
        if not np.isfinite(peak) or peak > _OVERFLOW_LIMIT:
            raise NumericalError(f"formal power X^({n}) overflow; K too large for this interval")

    phi = [f * Xt[k] if k % 2 == 0 else f * X[k] for k in range(K + 1)]
    psi = [X[k] / f if k % 2 == 0 else Xt[k] / f for k in range(K + 1)]
    fp_over_f = fp / f
    phi_prime = [fp] + [psi[k - 1] * k + fp_over_f * phi[k] for k in range(1, K + 1)]
    return FormalPowers(phi, psi, phi_prime, X, Xt)

"""Residual diagnostics and automatic truncation-order selection.

The kernel boundary values are computable from the data alone:

    K(x, x)   = h/2 + (1/2) int_0^x q        K(x, -x)  = h/2
    K_1(x, x) = (1/4)(q(x) + h int_0^x q + (1/2)(int_0^x q)^2)
    K_1(x, -x)= (1/4)(q(0) + h int_0^x q)

so the partial sums of beta_j(x)/x (plain and alternating) measure the
kernel truncation error, and the gamma sums measure the derivative-kernel
error.  The truncation order is chosen where the worst of the four
residuals at x = b is smallest; the choice rule is this package's own (the
plateau would otherwise be read off a plot by eye).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .coefficients import CoefficientSet
from .errors import ConfigError

__all__ = [
    "goursat_residuals",
    "kernel1_residuals",
    "residual_table",
    "residual_table_csv",
    "select_N",
    "SelectionResult",
]


def _boundary_sums(cs: CoefficientSet, x: float):
    i = cs.grid.index_of(x)
    if i == 0:
        raise ConfigError("residuals need x >= the first interior node")
    if i == cs.grid.n - 1:
        beta = cs.sigma_scaled[:, -1]
        gamma = cs.tau_scaled[:, -1]
    else:
        beta = np.array([cs.beta_values(n)[i] for n in range(cs.N + 1)])
        gamma = np.array([cs.gamma_values(n)[i] for n in range(cs.N + 1)])
    xv = cs.grid.nodes[i]
    Q = complex(cs.q_cum.values[i])
    signs = (-1.0) ** np.arange(cs.N + 1)
    return i, xv, Q, np.cumsum(beta) / xv, np.cumsum(beta * signs) / xv, np.cumsum(gamma) / xv, np.cumsum(gamma * signs) / xv


def goursat_residuals(cs: CoefficientSet, x: float, N: int) -> tuple[float, float]:
    """(eps1, eps2): kernel boundary mismatches of the order-N beta sums."""
    if not 0 <= N <= cs.N:
        raise ConfigError(f"N = {N} outside 0..{cs.N}")
    _, _, Q, plain_b, alt_b, _, _ = _boundary_sums(cs, x)
    eps1 = abs(plain_b[N] - (cs.h / 2.0 + Q / 2.0))
    eps2 = abs(alt_b[N] - cs.h / 2.0)
    return float(eps1), float(eps2)


def kernel1_residuals(cs: CoefficientSet, x: float, N: int) -> tuple[float, float]:
    """(d1, d2): derivative-kernel boundary mismatches of the gamma sums."""
    if not 0 <= N <= cs.N:
        raise ConfigError(f"N = {N} outside 0..{cs.N}")
    i, _, Q, _, _, plain_g, alt_g = _boundary_sums(cs, x)
    qx = complex(cs.q.values[i])
    q0 = complex(cs.q.values[0])
    d1 = abs(plain_g[N] - 0.25 * (qx + cs.h * Q + 0.5 * Q * Q))
    d2 = abs(alt_g[N] - 0.25 * (q0 + cs.h * Q))
    return float(d1), float(d2)


def residual_table(cs: CoefficientSet, x: float) -> np.ndarray:
    """Rows (N, eps1, eps2, d1, d2) for N = 0..cs.N at the point x."""
    i, _, Q, plain_b, alt_b, plain_g, alt_g = _boundary_sums(cs, x)
    qx = complex(cs.q.values[i])
    q0 = complex(cs.q.values[0])
    out = np.empty((cs.N + 1, 5))
    out[:, 0] = np.arange(cs.N + 1)
    out[:, 1] = np.abs(plain_b - (cs.h / 2.0 + Q / 2.0))
    out[:, 2] = np.abs(alt_b - cs.h / 2.0)
    out[:, 3] = np.abs(plain_g - 0.25 * (qx + cs.h * Q + 0.5 * Q * Q))
    out[:, 4] = np.abs(alt_g - 0.25 * (q0 + cs.h * Q))
    return out


def residual_table_csv(table: np.ndarray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["N", "eps1", "eps2", "d1", "d2"])
    for row in table:
        w.writerow([int(row[0])] + [f"{v:.17g}" for v in row[1:]])
    return buf.getvalue()


@dataclass(frozen=True)
class SelectionResult:
    n_star: int
    residual: float
    stabilized: bool
    at_limit: bool
    table: np.ndarray

    @property
    def warning(self) -> str | None:
        if self.at_limit:
            return (
                f"residual minimum sits at the last computed order N = {self.n_star}; "
                "consider recomputing with a larger coefficient count"
            )
        return None


def select_N(cs: CoefficientSet, x: float) -> SelectionResult:
    """Truncation order minimizing the worst of the four residuals at x.

    Ties break toward smaller N (argmin of the cumulative table).
    ``stabilized`` is set when the last five residuals differ by less than
    10%; ``at_limit`` flags a minimum at N = cs.N, where a larger
    coefficient count could still help.
    """
    table = residual_table(cs, x)
    worst = table[:, 1:].max(axis=1)
    n_star = int(np.argmin(worst))
    stabilized = False
    if len(worst) >= 5:
        tail = worst[-5:]
        stabilized = bool(tail.max() <= 1.1 * max(tail.min(), 1e-300))
    return SelectionResult(n_star, float(worst[n_star]), stabilized, n_star == cs.N, table)

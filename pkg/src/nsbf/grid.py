"""Grids on [0, b], sampled complex functions, and cumulative integration.

Two grid families are supported: uniform nodes integrated with a composite
6-point Newton-Cotes rule (node count constraint: the panel count n-1 must be
a multiple of 5), and Chebyshev-Gauss-Lobatto nodes integrated with the
Filippi variant of Clenshaw-Curtis (coefficient-space antiderivative with the
trailing interpolation coefficient halved).

Every recursive integral in the solver reduces to ``cumulative_integral``,
which returns the antiderivative vanishing at 0 sampled on the same grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.fft import dct

from .errors import ConfigError

__all__ = ["Grid", "SampledFunction", "make_grid", "cumulative_integral"]

# Integrals of the degree-5 Lagrange basis polynomials (equispaced nodes
# 0..5, unit spacing) from 0 to k, for k = 1..5.  Row 5 is the classical
# composite rule (5/288)*(19, 75, 50, 50, 75, 19); rows 1..4 give the
# node-wise partial integrals so every node of a panel receives a value.
_NC6_CUMULATIVE = np.array(
    [
        [95 / 288, 1427 / 1440, -133 / 240, 241 / 720, -173 / 1440, 3 / 160],
        [14 / 45, 43 / 30, 7 / 45, 7 / 45, -1 / 15, 1 / 90],
        [51 / 160, 219 / 160, 57 / 80, 57 / 80, -21 / 160, 3 / 160],
        [14 / 45, 64 / 45, 8 / 15, 64 / 45, 14 / 45, 0.0],
        [95 / 288, 125 / 96, 125 / 144, 125 / 144, 125 / 96, 95 / 288],
    ]
)


@dataclass(frozen=True)
class Grid:
    """Discretization of [0, b].

    Attributes
    ----------
    kind : str
        ``"uniform"`` or ``"chebyshev"``.
    b : float
        Interval length (> 0).
    n : int
        Node count (>= 6); nodes[0] = 0 and nodes[n-1] = b.
    nodes : ndarray
        Strictly increasing node abscissae.
    """

    kind: str
    b: float
    n: int
    nodes: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.nodes.setflags(write=False)

    @property
    def spacing(self) -> float:
        """Uniform node spacing; meaningless for chebyshev grids."""
        return self.b / (self.n - 1)

    def index_of(self, x: float) -> int:
        """Index of the node equal to ``x`` (within 1e-12 * b)."""
        i = int(np.searchsorted(self.nodes, x))
        for j in (i - 1, i, i + 1):
            if 0 <= j < self.n and abs(self.nodes[j] - x) <= 1e-12 * max(1.0, self.b):
                return j
        raise ConfigError(f"x = {x} is not a grid node")

    def zeros(self) -> "SampledFunction":
        return SampledFunction(self, np.zeros(self.n, dtype=complex))


@dataclass(frozen=True)
class SampledFunction:
    """Complex-valued function sampled on a Grid.

    Arithmetic is defined between functions sharing the identical Grid
    object, and with scalars; all operations return new instances.
    """

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.grid.n,):
            raise ConfigError(
                f"sample count {vals.shape} does not match grid size {self.grid.n}"
            )
        object.__setattr__(self, "values", vals)
        self.values.setflags(write=False)

    def _coerce(self, other):
        if isinstance(other, SampledFunction):
            if other.grid is not self.grid:
                raise ConfigError("arithmetic between functions on different grids")
            return other.values
        return complex(other)

    def __add__(self, other):
        return SampledFunction(self.grid, self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return SampledFunction(self.grid, self.values - self._coerce(other))

    def __rsub__(self, other):
        return SampledFunction(self.grid, self._coerce(other) - self.values)

    def __mul__(self, other):
        return SampledFunction(self.grid, self.values * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return SampledFunction(self.grid, self.values / self._coerce(other))

    def __rtruediv__(self, other):
        return SampledFunction(self.grid, self._coerce(other) / self.values)

    def __neg__(self):
        return SampledFunction(self.grid, -self.values)

    def __call__(self, x: float) -> complex:
        return complex(self.values[self.grid.index_of(x)])

    def max_abs(self) -> float:
        return float(np.abs(self.values).max())

    def is_real(self, tol: float = 1e-14) -> bool:
        return bool(np.abs(self.values.imag).max() < tol)


def make_grid(kind: str, b: float, n: int) -> Grid:
    """Build a grid on [0, b].

    Parameters
    ----------
    kind : {"uniform", "chebyshev"}
    b : float
        Interval length, > 0.
    n : int
        Node count, >= 6.  For uniform grids n-1 must be a multiple of 5
        (6-point Newton-Cotes panels).
    """
    if not (b > 0):
        raise ConfigError(f"interval length must be positive, got {b}")
    if n < 6:
        raise ConfigError(f"need at least 6 nodes, got {n}")
    if kind == "uniform":
        if (n - 1) % 5 != 0:
            raise ConfigError(
                f"uniform grid needs (n-1) divisible by 5, got n = {n}"
            )
        nodes = np.linspace(0.0, b, n)
    elif kind == "chebyshev":
        nodes = b * (1.0 - np.cos(np.arange(n) * np.pi / (n - 1))) / 2.0
        nodes[0] = 0.0
        nodes[-1] = b
    else:
        raise ConfigError(f"unknown grid kind {kind!r}")
    return Grid(kind, float(b), int(n), nodes)


def cumulative_integral(sf: SampledFunction) -> SampledFunction:
    """Antiderivative F with F(0) = 0, sampled at every node of sf's grid."""
    if sf.grid.kind == "uniform":
        out = _cumulative_newton_cotes(sf.values, sf.grid.spacing)
    else:
        out = _cumulative_filippi(sf.values, sf.grid.b)
    return SampledFunction(sf.grid, out)


def _cumulative_newton_cotes(vals, h):
    """Per-panel integrals of the local degree-5 interpolant."""
    n = len(vals)
    panels = np.lib.stride_tricks.sliding_window_view(vals, 6)[::5]
    sub = h * (panels @ _NC6_CUMULATIVE.T)  # (npanels, 5)
    out = np.empty(n, dtype=complex)
    out[0] = 0.0
    bases = np.concatenate(([0.0], np.cumsum(sub[:, 4])))
    out[1:] = (bases[:-1, None] + sub).ravel()
    return out


def _cumulative_filippi(vals, b):
    """Chebyshev-coefficient antiderivative with the last coefficient halved.

    Works in the standard variable u = 2x/b - 1; grid nodes ascend in x, so
    values are reversed into the descending-u order used by the DCT.
    """
    n = len(vals)
    N = n - 1
    w = vals[::-1]
    ahat = _dct1(w) / N
    c = ahat.copy()
    c[0] *= 0.5
    c[N] *= 0.5
    # antiderivative coefficients, including the degree-(N+1) term
    A = np.zeros(n + 1, dtype=complex)
    A[1] = c[0] - (c[2] / 2 if n > 2 else 0.0)
    for k in range(2, n + 1):
        A[k] = (c[k - 1] - (c[k + 1] if k + 1 <= N else 0.0)) / (2 * k)
    A *= b / 2
    # evaluate at the nodes: degree <= N part via a DCT, plus the aliased
    # T_{N+1} term, T_{N+1}(u_j) = (-1)^j u_j
    alpha = A[:n].copy()
    alpha[1:N] *= 0.5
    Pu = _dct1(alpha)
    j = np.arange(n)
    Pu = Pu + A[n] * (-1.0) ** j * np.cos(j * np.pi / N)
    Pm1 = np.sum(A * (-1.0) ** np.arange(n + 1))
    return (Pu - Pm1)[::-1]


def _dct1(x):
    """Type-I DCT of a complex vector (scipy's dct is real-only)."""
    if np.iscomplexobj(x):
        return dct(x.real, type=1) + 1j * dct(x.imag, type=1)
    return dct(x, type=1).astype(complex)

"""Spherical Bessel functions of complex argument and Legendre polynomials.

The j_k sequence is produced by a Lentz continued fraction for the ratio
j_n/j_{n-1} at the top order followed by downward three-term recurrence and
normalization against j_0 (or j_1 near zeros of sin z), which is stable for
orders beyond |z|; a truncated ascending series covers |z| <= 1e-4.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError

__all__ = [
    "BesselSequence",
    "spherical_j_sequence",
    "spherical_j_over_z",
    "spherical_j_table",
    "legendre_sequence",
]

_SMALL_Z = 1e-4
_RESCALE = 1e250


@dataclass(frozen=True)
class BesselSequence:
    """j_0(z) .. j_{n_max}(z) for one complex argument."""

    z: complex
    values: np.ndarray


def _series_j(z, n_max):
    """Ascending series, 4 terms; adequate to ~1e-26 relative for |z|<=1e-4."""
    z2 = z * z
    out = np.empty(n_max + 1, dtype=complex)
    t = 1.0 + 0j  # z^k / (2k+1)!!
    for k in range(n_max + 1):
        out[k] = t * (
            1.0
            - z2 / (2 * (2 * k + 3))
            + z2 * z2 / (8 * (2 * k + 3) * (2 * k + 5))
            - z2 * z2 * z2 / (48 * (2 * k + 3) * (2 * k + 5) * (2 * k + 7))
        )
        t = t * z / (2 * k + 3)
    return out


def _series_j_over_z(z, n_max):
    """j_k(z)/z by the same series with one power removed; k = 0 entry is 0
    and must not be used (j_0/z diverges at 0)."""
    z2 = z * z
    out = np.zeros(n_max + 1, dtype=complex)
    t = 1.0 / 3.0 + 0j  # z^{k-1} / (2k+1)!!
    for k in range(1, n_max + 1):
        out[k] = t * (
            1.0
            - z2 / (2 * (2 * k + 3))
            + z2 * z2 / (8 * (2 * k + 3) * (2 * k + 5))
            - z2 * z2 * z2 / (48 * (2 * k + 3) * (2 * k + 5) * (2 * k + 7))
        )
        t = t * z / (2 * k + 3)
    return out


def _lentz_ratio(z, n):
    """Continued fraction for j_n(z)/j_{n-1}(z) (modified Lentz)."""
    tiny = 1e-290
    f = tiny
    c = f
    d = 0.0 + 0j
    for m in range(1, 30001):
        bm = (2 * (n + m) - 1) / z
        am = 1.0 + 0j if m == 1 else -1.0 + 0j
        d = bm + am * d
        if d == 0:
            d = tiny
        c = bm + am / c
        if c == 0:
            c = tiny
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            return f
    raise NumericalError(f"Bessel ratio CF did not converge at z = {z}, n = {n}")


def spherical_j_sequence(z: complex, n_max: int) -> BesselSequence:
    """Spherical Bessel functions j_0..j_{n_max} at complex z.

    Raises NumericalError when sin z / cos z overflow (|Im z| beyond the
    double exponent range); the caller should rescale the problem.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    z = complex(z)
    if abs(z) <= _SMALL_Z:
        return BesselSequence(z, _series_j(z, n_max))
    if abs(z.imag) > 700.0:
        raise NumericalError(f"spherical Bessel overflow at z = {z}; rescale")
    j0 = cmath.sin(z) / z
    if n_max == 0:
        return BesselSequence(z, np.array([j0]))
    j1 = j0 / z - cmath.cos(z) / z
    jj = np.empty(n_max + 1, dtype=complex)
    jj[n_max] = _lentz_ratio(z, n_max)
    if n_max >= 1:
        jj[n_max - 1] = 1.0
    for k in range(n_max - 1, 0, -1):
        jj[k - 1] = (2 * k + 1) / z * jj[k] - jj[k + 1]
        if abs(jj[k - 1]) > _RESCALE:
            jj[k - 1 :] /= _RESCALE
    scale = j0 / jj[0] if abs(j0) >= abs(j1) else j1 / jj[1]
    return BesselSequence(z, jj * scale)


def spherical_j_over_z(z: complex, n_max: int) -> np.ndarray:
    """j_k(z)/z for k = 0..n_max; finite at z -> 0 for k >= 1.

    The k = 0 entry equals j_0(z)/z when z != 0 and is set to 0 at z = 0;
    callers pairing it with a vanishing weight must not rely on it.
    """
    z = complex(z)
    if abs(z) <= _SMALL_Z:
        return _series_j_over_z(z, n_max)
    return spherical_j_sequence(z, n_max).values / z


def spherical_j_table(z: np.ndarray, n_max: int) -> np.ndarray:
    """Vectorized j table, shape (n_max+1, len(z)), complex z array."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros((n_max + 1, z.size), dtype=complex)
    small = np.abs(z) <= _SMALL_Z
    if small.any():
        zs = z[small]
        z2 = zs * zs
        t = np.ones_like(zs)
        for k in range(n_max + 1):
            out[k, small] = t * (
                1.0
                - z2 / (2 * (2 * k + 3))
                + z2 * z2 / (8 * (2 * k + 3) * (2 * k + 5))
                - z2 * z2 * z2 / (48 * (2 * k + 3) * (2 * k + 5) * (2 * k + 7))
            )
            t = t * zs / (2 * k + 3)
    big = ~small
    if big.any():
        zb = z[big]
        if np.abs(zb.imag).max() > 700.0:
            raise NumericalError("spherical Bessel overflow in table; rescale")
        out[:, big] = _table_downward(zb, n_max)
    return out


def _table_downward(zb, n_max):
    j0 = np.sin(zb) / zb
    if n_max == 0:
        return j0[None, :]
    j1 = j0 / zb - np.cos(zb) / zb
    # vectorized Lentz
    tiny = 1e-290
    f = np.full_like(zb, tiny)
    c = f.copy()
    d = np.zeros_like(zb)
    active = np.ones(zb.shape, dtype=bool)
    for m in range(1, 30001):
        if not active.any():
            break
        bm = (2 * (n_max + m) - 1) / zb[active]
        am = 1.0 if m == 1 else -1.0
        da = bm + am * d[active]
        da[da == 0] = tiny
        ca = bm + am / c[active]
        ca[ca == 0] = tiny
        da = 1.0 / da
        delta = ca * da
        f[active] *= delta
        d[active] = da
        c[active] = ca
        sub = np.abs(delta - 1.0) >= 1e-16
        idx = np.flatnonzero(active)
        active[idx[~sub]] = False
    else:
        raise NumericalError("Bessel ratio CF did not converge (table)")
    jj = np.empty((n_max + 1, zb.size), dtype=complex)
    jj[n_max] = f
    jj[n_max - 1] = 1.0
    for k in range(n_max - 1, 0, -1):
        jj[k - 1] = (2 * k + 1) / zb * jj[k] - jj[k + 1]
        over = np.abs(jj[k - 1]) > _RESCALE
        if over.any():
            jj[k - 1 :, over] /= _RESCALE
    use0 = np.abs(j0) >= np.abs(j1)
    scale = np.where(use0, j0 / jj[0], j1 / jj[1])
    return jj * scale


def legendre_sequence(t: float, n_max: int) -> np.ndarray:
    """P_0(t)..P_{n_max}(t) by the three-term recurrence, t in [-1, 1]."""
    out = np.empty(n_max + 1)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = t
    for k in range(1, n_max):
        out[k + 1] = ((2 * k + 1) * t * out[k] - k * out[k - 1]) / (k + 1)
    return out

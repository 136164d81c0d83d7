"""Sturm-Liouville spectral problems through the characteristic function.

The eigenvalues of

    -y'' + q(x) y = lam y on [0, b],
    alpha0 y(0) + mu0 y'(0) = 0,  alphab y(b) + mub y'(b) = 0

are the squares of the zeros of

    Phi(w) = alphab (mu0 c_N - (alpha0 + mu0 h) s_N / w)
           + mub    (mu0 c*_N - (alpha0 + mu0 h) s*_N / w)      (all at x = b)

where the quotients are the regularized evaluations, so Phi is finite and
smooth through w = 0.  Real spectra are located by bracketing sign changes
of Re Phi on the real w axis (and on the positive imaginary axis for
negative eigenvalues lam = -nu^2) and polishing with the secant method;
complex spectra are localized by the argument principle on subdivided
rectangles and polished with Newton steps.
"""

from __future__ import annotations

import cmath
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .accuracy import SelectionResult, select_N
from .coefficients import CoefficientSet, coefficients_recurrent
from .errors import ConfigError, NumericalError
from .expressions import Expr, evaluate, parse, sample
from .grid import Grid, SampledFunction, make_grid
from .solution import NsbfSolver
from .spps import ParticularSolution, particular_solution

log = logging.getLogger(__name__)

__all__ = [
    "BoundaryCondition",
    "SpectralProblem",
    "Spectrum",
    "EigenvalueEntry",
    "assemble",
    "char_fn",
    "find_real_spectrum",
    "find_complex_spectrum",
    "eigenfunction",
]

_REAL_Q_TOL = 1e-14


@dataclass(frozen=True)
class BoundaryCondition:
    """Robin coefficients at both endpoints; each a constant or an expression
    in the square root w of the spectral parameter."""

    alpha0: complex | Expr
    mu0: complex | Expr
    alphab: complex | Expr
    mub: complex | Expr

    @staticmethod
    def dirichlet() -> "BoundaryCondition":
        return BoundaryCondition(1.0 + 0j, 0j, 1.0 + 0j, 0j)

    @staticmethod
    def from_strings(alpha0: str, mu0: str, alphab: str, mub: str) -> "BoundaryCondition":
        def conv(text):
            e = parse(text, variable="w")
            try:
                return evaluate(e, 0j) if _is_constant(e) else e
            except Exception:
                return e

        return BoundaryCondition(conv(alpha0), conv(mu0), conv(alphab), conv(mub))

    def at(self, omega: complex) -> tuple[complex, complex, complex, complex]:
        vals = tuple(
            evaluate(c, omega) if isinstance(c, Expr) else complex(c)
            for c in (self.alpha0, self.mu0, self.alphab, self.mub)
        )
        a0, m0, ab, mb = vals
        if abs(a0) + abs(m0) == 0 or abs(ab) + abs(mb) == 0:
            raise NumericalError(f"degenerate boundary condition at w = {omega}")
        return vals

    def is_constant(self) -> bool:
        return not any(isinstance(c, Expr) for c in (self.alpha0, self.mu0, self.alphab, self.mub))


def _is_constant(e: Expr) -> bool:
    from .expressions import BinOp, Call, Neg, Num, Var

    if isinstance(e, Num):
        return True
    if isinstance(e, Var):
        return False
    if isinstance(e, Neg):
        return _is_constant(e.arg)
    if isinstance(e, Call):
        return _is_constant(e.arg)
    if isinstance(e, BinOp):
        return _is_constant(e.left) and _is_constant(e.right)
    return False


@dataclass
class SpectralProblem:
    """Potential, interval, boundary coefficients, grid and truncation setup."""

    q_expr: Expr | None
    b: float
    bc: BoundaryCondition
    grid_kind: str = "uniform"
    grid_n: int = 20001
    n_coeffs: int = 40
    q_sampled: SampledFunction | None = None  # alternative to q_expr (tabulated)
    override_f_expr: Expr | None = None
    override_h: complex | None = None

    def build_grid(self) -> Grid:
        return make_grid(self.grid_kind, self.b, self.grid_n)


@dataclass(frozen=True)
class EigenvalueEntry:
    index: int
    omega: complex
    lam: complex
    residual: float
    iterations: int


@dataclass
class Spectrum:
    entries: list[EigenvalueEntry] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([e.lam for e in self.entries])

    def to_rows(self) -> list[dict]:
        return [
            {
                "index": e.index,
                "lambda_re": e.lam.real,
                "lambda_im": e.lam.imag,
                "omega_re": e.omega.real,
                "omega_im": e.omega.imag,
                "residual": e.residual,
            }
            for e in self.entries
        ]


@dataclass
class Assembly:
    """Everything the searches need: solver, selection report, realness flag."""

    problem: SpectralProblem
    grid: Grid
    q: SampledFunction
    ps: ParticularSolution
    cs: CoefficientSet
    selection: SelectionResult
    solver: NsbfSolver
    q_is_real: bool


def assemble(problem: SpectralProblem, n_active: int | None = None) -> Assembly:
    """Run the pipeline: sample q, build f, the coefficients, and pick N."""
    grid = problem.build_grid()
    if problem.q_sampled is not None:
        if problem.q_sampled.grid is not grid:
            q = SampledFunction(grid, problem.q_sampled.values)
        else:
            q = problem.q_sampled
    elif problem.q_expr is not None:
        q = sample(problem.q_expr, grid)
    else:
        raise ConfigError("problem has neither a potential expression nor samples")

    t0 = time.perf_counter()
    if problem.override_f_expr is not None:
        override_f = sample(problem.override_f_expr, grid)
        h = problem.override_h
        if h is None:
            h = _richardson_derivative(problem.override_f_expr)
        ps = particular_solution(q, override_f, h)
    else:
        ps = particular_solution(q)
    t1 = time.perf_counter()
    log.info("particular solution: %.2f s (min |f| = %.3g)", t1 - t0, ps.min_abs)

    cs = coefficients_recurrent(ps, q, problem.n_coeffs)
    t2 = time.perf_counter()
    log.info("coefficients to N = %d: %.2f s", problem.n_coeffs, t2 - t1)

    selection = select_N(cs, grid.b)
    log.info("selected N* = %d (worst residual %.3e): %.2f s",
             selection.n_star, selection.residual, time.perf_counter() - t2)
    if selection.warning:
        log.warning(selection.warning)
    active = n_active if n_active is not None else max(selection.n_star, 1)
    solver = NsbfSolver(cs, ps, active)
    return Assembly(problem, grid, q, ps, cs, selection, solver, q.is_real(_REAL_Q_TOL))


def _richardson_derivative(expr: Expr, x0: float = 0.0) -> complex:
    """f'(x0) by three-level Richardson extrapolation of central differences."""
    d = []
    for k in range(3):
        step = 1e-2 / 4**k
        d.append((evaluate(expr, x0 + step) - evaluate(expr, x0 - step)) / (2 * step))
    d1 = (4 * d[1] - d[0]) / 3
    d2 = (4 * d[2] - d[1]) / 3
    return (16 * d2 - d1) / 15


def char_fn(problem: SpectralProblem, solver: NsbfSolver, omega: complex) -> complex:
    """Phi_N(w): the approximate characteristic function at x = b."""
    a0, m0, ab, mb = problem.bc.at(omega)
    vals = solver.eval_basis(omega, problem.b)
    coeff = a0 + m0 * solver.h
    return ab * (m0 * vals.c - coeff * vals.s_over_omega) + mb * (
        m0 * vals.c_prime - coeff * vals.s_prime_over_omega
    )


# ---------------------------------------------------------------------------
# real spectrum


def _require_converged_series(problem: SpectralProblem, solver: NsbfSolver):
    """Refuse to hunt for zeros when the kernel series never converged.

    For strongly positive potentials the transmutation kernel grows like
    exp(sqrt(q) b), so its double-precision boundary residual can plateau at
    a large value; zeros of Phi located under that noise would be spurious.
    """
    from .accuracy import goursat_residuals

    eps1, eps2 = goursat_residuals(solver.cs, problem.b, solver.N_active)
    Q = complex(solver.cs.q_cum.values[-1])
    scale = max(1.0, abs(solver.cs.h / 2 + Q / 2))
    if max(eps1, eps2) > 1e-2 * scale:
        raise NumericalError(
            f"kernel residual {max(eps1, eps2):.3e} is large relative to its target "
            f"({scale:.3e}): the coefficient series did not converge at this precision "
            "(potential too large/positive or N too small); eigenvalues would be spurious"
        )


def _secant_real(fn, x0, x1, tol_scale=1e-13, max_iter=80):
    f0, f1 = fn(x0), fn(x1)
    it = 0
    for it in range(1, max_iter + 1):
        if f1 == f0:
            break
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        x0, f0 = x1, f1
        x1 = x2
        f1 = fn(x1)
        if abs(x1 - x0) < tol_scale * max(1.0, abs(x1)):
            return x1, it
    if abs(x1 - x0) < 1e3 * tol_scale * max(1.0, abs(x1)):  # roundoff-limited wobble
        return x1, it
    raise NumericalError(f"secant refinement did not converge on [{x0}, {x1}]")


def _scan_axis(fn, mesh):
    """Brackets of sign changes of fn over mesh, plus positions where |fn|
    dips far below its scale without changing sign (suspected double roots)."""
    vals = np.array([fn(t) for t in mesh])
    brackets = []
    for i in range(len(mesh) - 1):
        if vals[i] == 0.0:
            brackets.append((mesh[i], mesh[i]))
        elif np.sign(vals[i]) != np.sign(vals[i + 1]):
            brackets.append((mesh[i], mesh[i + 1]))
    dips = []
    scale = np.median(np.abs(vals)) + 1e-300
    for i in range(1, len(mesh) - 1):
        if (
            abs(vals[i]) < 1e-8 * scale
            and np.sign(vals[i - 1]) == np.sign(vals[i + 1])
            and abs(vals[i]) < abs(vals[i - 1])
            and abs(vals[i]) < abs(vals[i + 1])
        ):
            dips.append(float(mesh[i]))
    return brackets, dips


def find_real_spectrum(
    problem: SpectralProblem,
    solver: NsbfSolver,
    count: int | None = None,
    omega_max: float | None = None,
    nu_max: float = 0.0,
) -> Spectrum:
    """Eigenvalues with real lam: scan the real w axis (and the imaginary
    axis up to nu_max for lam = -nu^2 < 0), bracket, refine by secant.

    Requires a problem whose characteristic function is real on the scanned
    axes (real-valued q with suitable boundary coefficients); raises
    otherwise, pointing at the complex search.  omega_max = 0 skips the real
    axis entirely (purely negative spectra, e.g. quantum wells with
    spectral-parameter-dependent boundary conditions); omega_max = None
    derives a window from the requested count and widens it as needed.
    """
    _require_converged_series(problem, solver)
    auto_window = omega_max is None
    if auto_window:
        if count is None:
            raise ConfigError("find_real_spectrum needs a count or an omega range")
        omega_max = math.pi * (count + 3) / problem.b + 2.0
    scan_real_axis = omega_max > 0.0

    spectrum = Spectrum()
    step = math.pi / (4.0 * problem.b)

    def phi_real_axis(w):
        return char_fn(problem, solver, w)

    def phi_imag_axis(nu):
        return char_fn(problem, solver, 1j * nu)

    roots: list[tuple[complex, complex, float, int]] = []  # (omega, lam, |Phi|, iters)

    def run_axis(phi, mesh, to_omega):
        vals_probe = [phi(t) for t in mesh[:: max(1, len(mesh) // 16)]]
        scale = max(abs(v) for v in vals_probe)
        imag_leak = max(abs(v.imag) for v in vals_probe)
        if scale > 0 and imag_leak > 1e-3 * scale:
            raise NumericalError(
                "characteristic function is not real on this axis; use the complex search"
            )
        fn = lambda t: phi(t).real
        brackets, dips = _scan_axis(fn, mesh)
        for pos in dips:
            spectrum.warnings.append(
                f"suspected double root near omega = {to_omega(pos):.6g} "
                "(|Phi| dips without a sign change)"
            )
        for lo, hi in brackets:
            if lo == hi:
                root, it = lo, 0
            else:
                root, it = _secant_real(fn, lo, hi)
            w = to_omega(root)
            roots.append((w, w * w, abs(phi(root)), it))

    # real axis: coarse mesh over the requested range plus a 4x finer mesh
    # near the origin so closely spaced low eigenvalues are not skipped
    target = omega_max
    attempts = 4 if (scan_real_axis and auto_window) else 1
    for attempt in range(attempts):
        roots.clear()
        spectrum.warnings.clear()
        if scan_real_axis:
            fine_hi = min(target, 20.0 * math.pi / problem.b)
            fine = np.arange(0.0, fine_hi + step / 4, step / 4)
            coarse = np.arange(fine_hi, target + step, step)
            run_axis(phi_real_axis, np.concatenate([fine, coarse]), lambda t: complex(t))
        if nu_max > 0.0:
            nus = np.arange(step / 4, nu_max + step / 4, step / 4)
            run_axis(phi_imag_axis, nus, lambda t: 1j * t)
        # lam = 0 is checked explicitly through the regularized limit; a
        # boundary condition degenerating exactly at w = 0 simply skips it
        try:
            phi0 = char_fn(problem, solver, 0.0)
            probe = abs(char_fn(problem, solver, max(step, 1e-3)))
            if abs(phi0) < 1e-12 * max(1.0, probe):
                roots.append((0j, 0j, abs(phi0), 0))
        except NumericalError:
            pass
        if count is None or len(roots) >= count:
            break
        target *= 1.6
    if count is not None and len(roots) < count:
        raise NumericalError(
            f"found only {len(roots)} eigenvalues in the scanned region; requested {count}"
        )

    roots.sort(key=lambda r: r[1].real)
    dedup: list[tuple[complex, complex, float, int]] = []
    for r in roots:
        if dedup and abs(r[1] - dedup[-1][1]) <= 1e-9 * max(1.0, abs(r[1])):
            continue
        dedup.append(r)
    if count is not None:
        dedup = dedup[:count]
    spectrum.entries = [
        EigenvalueEntry(i, w, lam, res, it) for i, (w, lam, res, it) in enumerate(dedup)
    ]
    return spectrum


# ---------------------------------------------------------------------------
# complex spectrum


def _phase_steps(phases):
    d = np.diff(phases)
    return (d + math.pi) % (2 * math.pi) - math.pi


class _BoundaryWalker:
    """Adaptive winding number of Phi along a rectangle boundary."""

    def __init__(self, phi, max_points=200000):
        self.phi = phi
        self.max_points = max_points

    def winding(self, re0, re1, im0, im1, init_step):
        corners = [
            complex(re0, im0),
            complex(re1, im0),
            complex(re1, im1),
            complex(re0, im1),
            complex(re0, im0),
        ]
        pts = []
        for a, bp in zip(corners[:-1], corners[1:]):
            m = max(2, int(math.ceil(abs(bp - a) / init_step)))
            for k in range(m):
                pts.append(a + (bp - a) * (k / m))
        pts.append(corners[0])
        zs = list(pts)
        ph = [cmath.phase(self.phi(z)) for z in zs]
        for _ in range(40):
            steps = _phase_steps(np.array(ph))
            bad = np.flatnonzero(np.abs(steps) >= math.pi / 2)
            if bad.size == 0:
                return int(round(float(np.sum(steps)) / (2 * math.pi)))
            if len(zs) + bad.size > self.max_points:
                break
            for i in reversed(bad):
                zm = 0.5 * (zs[i] + zs[i + 1])
                zs.insert(i + 1, zm)
                ph.insert(i + 1, cmath.phase(self.phi(zm)))
        raise NumericalError("phase step refinement failed (zero too close to the contour)")


def _newton_complex(phi, omega0, scale, max_iter=40):
    om = omega0
    best = om
    best_val = abs(phi(om))
    for it in range(1, max_iter + 1):
        d = 1e-7 * max(1.0, abs(om))
        deriv = (phi(om + d) - phi(om - d)) / (2 * d)
        if deriv == 0:
            break
        step = phi(om) / deriv
        om = om - step
        val = abs(phi(om))
        if val < best_val:
            best, best_val = om, val
        if val < 1e-12 * scale and (abs(step) < 1e-13 * max(1.0, abs(om)) or val < 1e-14 * scale):
            return om, it, val
    if best_val < 1e-12 * scale:
        return best, max_iter, best_val
    raise NumericalError(f"Newton refinement stalled near omega = {omega0} (|Phi| = {best_val:.3e})")


def find_complex_spectrum(
    problem: SpectralProblem,
    solver: NsbfSolver,
    rectangle: tuple[float, float, float, float],
    max_zeros: int = 100,
) -> Spectrum:
    """Eigenvalues inside a rectangle of the right half w-plane.

    The rectangle boundary must avoid w = 0.  Winding numbers localize the
    zeros: winding-0 boxes are dropped, boxes with winding >= 2 or sides
    above 0.1 are quartered, and unit-winding boxes are polished by Newton
    with central-difference derivatives.  A box whose contour refinement
    fails (a zero sits on the cut) is re-tried once after a 1% jitter.
    """
    _require_converged_series(problem, solver)
    re0, re1, im0, im1 = map(float, rectangle)
    if re0 >= re1 or im0 >= im1:
        raise ConfigError("rectangle must be (re_min, re_max, im_min, im_max)")
    if re0 <= 0 <= re1 and im0 <= 0 <= im1 and (re0 == 0 or im0 == 0 or im1 == 0):
        raise ConfigError("rectangle boundary passes through w = 0")

    phi = lambda w: char_fn(problem, solver, w)
    init_step = math.pi / (4.0 * problem.b)
    walker = _BoundaryWalker(phi)
    boundary_vals = [abs(phi(complex(re0 + t * (re1 - re0), im0))) for t in np.linspace(0, 1, 9)]
    scale = float(np.median(boundary_vals)) + 1e-300

    spectrum = Spectrum()
    found: list[tuple[complex, int, float]] = []

    def winding_of(box, jittered=False):
        try:
            return walker.winding(*box, init_step)
        except NumericalError:
            if jittered:
                raise
            r0, r1, i0, i1 = box
            dr = 0.01 * (r1 - r0)
            di = 0.01 * (i1 - i0)
            log.info("jittering rectangle %s by 1%%", box)
            return winding_of((r0 - dr, r1 + dr, i0 - di, i1 + di), jittered=True)

    stack = [(re0, re1, im0, im1, winding_of((re0, re1, im0, im1)), 0)]
    while stack:
        r0, r1, i0, i1, wn, depth = stack.pop()
        if wn == 0:
            continue
        if len(found) + wn > max_zeros:
            raise NumericalError(f"more than max_zeros = {max_zeros} zeros in the search region")
        side = max(r1 - r0, i1 - i0)
        if wn == 1 and side <= 0.1:
            om, iters, resid = _newton_complex(phi, complex((r0 + r1) / 2, (i0 + i1) / 2), scale)
            found.append((om, iters, resid))
            continue
        if depth > 60:
            spectrum.warnings.append(
                f"winding {wn} persists in a tiny box near {(r0 + r1) / 2 + 1j * (i0 + i1) / 2:.6g};"
                " possible multiple eigenvalue"
            )
            om, iters, resid = _newton_complex(phi, complex((r0 + r1) / 2, (i0 + i1) / 2), scale)
            found.append((om, iters, resid))
            continue
        def split(frac):
            rm = r0 + frac * (r1 - r0)
            im_ = i0 + frac * (i1 - i0)
            if (r1 - r0) > 4 * (i1 - i0):  # thin boxes split along the long side only
                return [(r0, rm, i0, i1), (rm, r1, i0, i1)]
            if (i1 - i0) > 4 * (r1 - r0):
                return [(r0, r1, i0, im_), (r0, r1, im_, i1)]
            return [(r0, rm, i0, im_), (rm, r1, i0, im_), (r0, rm, im_, i1), (rm, r1, im_, i1)]

        children = split(0.5)
        child_windings = [winding_of(c) for c in children]
        if sum(child_windings) != wn:
            # the cut passed near a zero, or the parent contour aliased;
            # re-walk the parent densely and shift the cut
            wn = walker.winding(r0, r1, i0, i1, init_step / 4)
            children = split(0.513)
            child_windings = [winding_of(c) for c in children]
            if sum(child_windings) != wn:
                raise NumericalError(
                    "winding numbers inconsistent after shifting the cut; "
                    "contour too close to a zero"
                )
        for c, cw in zip(children, child_windings):
            if cw:
                stack.append((*c, cw, depth + 1))

    found.sort(key=lambda t: (t[0] ** 2).real)
    spectrum.entries = [
        EigenvalueEntry(i, om, om * om, resid, iters) for i, (om, iters, resid) in enumerate(found)
    ]
    return spectrum


# ---------------------------------------------------------------------------
# eigenfunctions


def eigenfunction(
    problem: SpectralProblem,
    solver: NsbfSolver,
    omega: complex,
    normalize: bool = False,
) -> SampledFunction:
    """y = mu0 c_N - (alpha0 + mu0 h) s_N / w sampled on the whole grid."""
    a0, m0, _, _ = problem.bc.at(omega)
    c_vals, s_over = solver.eval_profile(omega)
    y = m0 * c_vals - (a0 + m0 * solver.h) * s_over
    if normalize:
        peak = np.abs(y).max()
        if peak > 0:
            y = y / peak
    return SampledFunction(solver.grid, y)

"""Problem configuration files (TOML or JSON) and tabulated potentials.

A configuration is flat key/value tables::

    [potential]
    expression = "exp(x)"        # or: csv = "potential.csv"

    [interval]
    b = "pi"                     # number or constant expression

    [grid]
    kind = "uniform"             # or "chebyshev"
    n = 20001

    [coefficients]
    N = 40

    [boundary]
    alpha0 = "1"                 # constants or expressions in w
    mu0 = "0"
    alphab = "1"
    mub = "0"

    [search]
    mode = "real"                # or "complex"
    count = 50                   # real mode: how many eigenvalues
    omega_max = 40.0             # optional scan limit
    nu_max = 0.0                 # imaginary-axis scan limit (negative lam)
    rectangle = [1.0, 40.0, -0.1, 0.9]   # complex mode
    max_zeros = 100

    [output]
    format = "json"              # or "csv"
    path = "spectrum.json"

    [particular_solution]        # optional override for f
    expression = "exp(x)"
    h = "1"                      # optional; f'(0), computed numerically if absent
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from .errors import ConfigError, ExpressionError
from .expressions import parse, parse_constant
from .grid import Grid, SampledFunction
from .spectral import BoundaryCondition, SpectralProblem

__all__ = ["ProblemConfig", "load_config", "load_tabulated_potential"]


@dataclass
class ProblemConfig:
    """Validated configuration; ``to_problem`` builds the solver input."""

    potential_expression: str | None
    potential_csv: str | None
    b: float
    grid_kind: str
    grid_n: int
    n_coeffs: int
    boundary: dict
    search: dict
    output_format: str
    output_path: str | None
    particular_expression: str | None = None
    particular_h: str | None = None
    source_path: Path | None = None
    warnings: list = field(default_factory=list)

    def to_problem(self) -> SpectralProblem:
        bc = BoundaryCondition.from_strings(
            self.boundary["alpha0"], self.boundary["mu0"],
            self.boundary["alphab"], self.boundary["mub"],
        )
        problem = SpectralProblem(
            q_expr=parse(self.potential_expression) if self.potential_expression else None,
            b=self.b,
            bc=bc,
            grid_kind=self.grid_kind,
            grid_n=self.grid_n,
            n_coeffs=self.n_coeffs,
        )
        if self.potential_csv:
            grid = problem.build_grid()
            path = Path(self.potential_csv)
            if not path.is_absolute() and self.source_path is not None:
                path = self.source_path.parent / path
            problem.q_sampled, note = load_tabulated_potential(path, grid)
            if note:
                self.warnings.append(note)
        if self.particular_expression:
            problem.override_f_expr = parse(self.particular_expression)
            if self.particular_h is not None:
                problem.override_h = parse_constant(str(self.particular_h))
        return problem


def _real_constant(value, name) -> float:
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        z = parse_constant(value)
        if abs(z.imag) > 1e-15 * max(1.0, abs(z.real)):
            raise ConfigError(f"{name} must be real, got {z}")
        return z.real
    raise ConfigError(f"{name} must be a number or constant expression")


def load_config(path: str | Path) -> ProblemConfig:
    """Parse and validate a TOML (default) or JSON configuration file."""
    path = Path(path)
    try:
        text = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if path.suffix.lower() == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"bad JSON in {path}: {exc}") from exc
    else:
        try:
            data = tomllib.loads(text.decode())
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"bad TOML in {path}: {exc}") from exc
    return parse_config_dict(data, source_path=path)


def parse_config_dict(data: dict, source_path: Path | None = None) -> ProblemConfig:
    def section(name, required=True):
        s = data.get(name)
        if s is None:
            if required:
                raise ConfigError(f"missing [{name}] section")
            return {}
        if not isinstance(s, dict):
            raise ConfigError(f"[{name}] must be a table")
        return s

    pot = section("potential")
    expr = pot.get("expression")
    csv_path = pot.get("csv")
    if (expr is None) == (csv_path is None):
        raise ConfigError("[potential] needs exactly one of 'expression' or 'csv'")
    if expr is not None:
        try:
            parse(str(expr))
        except ExpressionError as exc:
            raise ConfigError(f"bad potential expression: {exc}") from exc

    interval = section("interval")
    b = _real_constant(interval.get("b"), "interval.b")
    if not (b > 0 and np.isfinite(b)):
        raise ConfigError(f"interval.b must be positive and finite, got {b}")

    grid_sec = section("grid", required=False)
    grid_kind = str(grid_sec.get("kind", "uniform"))
    grid_n = int(grid_sec.get("n", 20001))

    coeff = section("coefficients", required=False)
    n_coeffs = int(coeff.get("N", 40))
    if n_coeffs < 1:
        raise ConfigError("coefficients.N must be >= 1")

    bnd = section("boundary")
    boundary = {}
    for key in ("alpha0", "mu0", "alphab", "mub"):
        if key not in bnd:
            raise ConfigError(f"[boundary] missing {key}")
        val = bnd[key]
        boundary[key] = str(val)
        try:
            parse(boundary[key], variable="w")
        except ExpressionError as exc:
            raise ConfigError(f"bad boundary coefficient {key}: {exc}") from exc

    srch = dict(section("search"))
    mode = srch.get("mode", "real")
    if mode not in ("real", "complex"):
        raise ConfigError(f"search.mode must be 'real' or 'complex', got {mode!r}")
    if mode == "real":
        if "count" not in srch and "omega_max" not in srch:
            raise ConfigError("real search needs 'count' and/or 'omega_max'")
        for key in ("omega_max", "nu_max"):
            if key in srch:
                srch[key] = _real_constant(srch[key], f"search.{key}")
    else:
        rect = srch.get("rectangle")
        if not (isinstance(rect, (list, tuple)) and len(rect) == 4):
            raise ConfigError("complex search needs rectangle = [re_min, re_max, im_min, im_max]")
        srch["rectangle"] = [_real_constant(v, "search.rectangle") for v in rect]

    out = section("output", required=False)
    output_format = str(out.get("format", "json"))
    if output_format not in ("json", "csv"):
        raise ConfigError(f"output.format must be json or csv, got {output_format!r}")
    output_path = out.get("path")

    part = section("particular_solution", required=False)

    return ProblemConfig(
        potential_expression=str(expr) if expr is not None else None,
        potential_csv=str(csv_path) if csv_path is not None else None,
        b=b,
        grid_kind=grid_kind,
        grid_n=grid_n,
        n_coeffs=n_coeffs,
        boundary=boundary,
        search=srch,
        output_format=output_format,
        output_path=str(output_path) if output_path is not None else None,
        particular_expression=part.get("expression"),
        particular_h=part.get("h"),
        source_path=source_path,
    )


def load_tabulated_potential(csv_path: str | Path, grid: Grid):
    """Resample a tabulated potential onto the grid nodes.

    Expects a header ``x,q`` or ``x,re,im`` and strictly increasing x values
    covering [0, b].  Cubic interpolation; with only two rows a linear
    fallback is used.  Returns (SampledFunction, note) where note records the
    interpolation as an extra error source.
    """
    csv_path = Path(csv_path)
    try:
        with open(csv_path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            rows = [r for r in reader if r and any(cell.strip() for cell in r)]
    except OSError as exc:
        raise ConfigError(f"cannot read potential CSV {csv_path}: {exc}") from exc
    if header is None:
        raise ConfigError(f"{csv_path}: empty file")
    cols = [c.strip().lower() for c in header]
    if cols[:2] == ["x", "q"]:
        complex_cols = False
    elif cols[:3] == ["x", "re", "im"]:
        complex_cols = True
    else:
        raise ConfigError(f"{csv_path}: header must be 'x,q' or 'x,re,im', got {header}")
    try:
        xs = np.array([float(r[0]) for r in rows])
        if complex_cols:
            qs = np.array([complex(float(r[1]), float(r[2])) for r in rows])
        else:
            qs = np.array([float(r[1]) for r in rows], dtype=complex)
    except (ValueError, IndexError) as exc:
        raise ConfigError(f"{csv_path}: parse failure: {exc}") from exc
    if len(xs) < 2:
        raise ConfigError(f"{csv_path}: need at least two rows")
    if not np.all(np.diff(xs) > 0):
        raise ConfigError(f"{csv_path}: x column must be strictly increasing")
    tol = 1e-12 * max(1.0, grid.b)
    if xs[0] > 0 + tol or xs[-1] < grid.b - tol:
        raise ConfigError(
            f"{csv_path}: x range [{xs[0]}, {xs[-1]}] does not cover [0, {grid.b}]"
        )
    if len(xs) < 4:
        note = f"{csv_path}: only {len(xs)} samples; linear interpolation fallback"
        warnings.warn(note)
        vals = np.interp(grid.nodes, xs, qs.real) + 1j * np.interp(grid.nodes, xs, qs.imag)
    else:
        note = (
            f"{csv_path}: potential resampled by cubic interpolation onto {grid.n} nodes; "
            "interpolation error adds to the solver error"
        )
        spline_re = CubicSpline(xs, qs.real)
        spline_im = CubicSpline(xs, qs.imag)
        vals = spline_re(grid.nodes) + 1j * spline_im(grid.nodes)
    return SampledFunction(grid, vals), note

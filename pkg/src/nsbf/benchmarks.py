"""Built-in benchmark problems with stored reference eigenvalues.

Reference values carry a provenance tag: ``published`` values come from
independent tables in the literature for these classic test problems,
``derived`` values were produced by a high-accuracy ODE shooting oracle and
frozen.  ``run_benchmark`` solves the problem from scratch and compares.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources

from .config import ProblemConfig, parse_config_dict
from .errors import ConfigError
from .spectral import assemble, find_complex_spectrum, find_real_spectrum

__all__ = ["BENCHMARKS", "benchmark_config", "run_benchmark", "BenchmarkReport"]

_PI = repr(math.pi)

_DIRICHLET = {"alpha0": "1", "mu0": "0", "alphab": "1", "mub": "0"}

_GL_POTENTIAL = "2*((1+x/2+sin(2*x)/4)*sin(2*x)+cos(x)^4)/(1+x/2+sin(2*x)/4)^2"

_CONFIGS = {
    "paine1": {
        "potential": {"expression": "exp(x)"},
        "interval": {"b": _PI},
        "grid": {"kind": "uniform", "n": 20001},
        "coefficients": {"N": 40},
        "boundary": _DIRICHLET,
        "search": {"mode": "real", "count": 20},
        "output": {"format": "json"},
    },
    "paine2": {
        "potential": {"expression": "1/(x+0.1)^2"},
        "interval": {"b": _PI},
        "grid": {"kind": "uniform", "n": 20001},
        "coefficients": {"N": 100},
        "boundary": _DIRICHLET,
        "search": {"mode": "real", "count": 20},
        "output": {"format": "json"},
    },
    "gelfand_levitan": {
        "potential": {"expression": _GL_POTENTIAL},
        "interval": {"b": 100},
        "grid": {"kind": "uniform", "n": 40001},
        "coefficients": {"N": 160},
        # u'(0) = -u(0) matches the published eigenvalues for this problem
        "boundary": {"alpha0": "1", "mu0": "1", "alphab": "1", "mub": "0"},
        "search": {"mode": "real", "count": 100},
        "output": {"format": "json"},
    },
    "sech_well": {
        "potential": {"expression": "-12*sech(x-8)^2"},
        "interval": {"b": 16},
        "grid": {"kind": "uniform", "n": 50001},
        "coefficients": {"N": 60},
        "boundary": {"alpha0": "i*w", "mu0": "1", "alphab": "-i*w", "mub": "1"},
        # quantum-well regime: lam = -nu^2 with nu in (0, sqrt(12))
        "search": {"mode": "real", "omega_max": 0.0, "nu_max": 3.4641016151377544, "count": 3},
        "output": {"format": "json"},
    },
    "complex_x2": {
        "potential": {"expression": "(1+i)*x^2"},
        "interval": {"b": _PI},
        "grid": {"kind": "uniform", "n": 4001},
        "coefficients": {"N": 40},
        "boundary": _DIRICHLET,
        "search": {"mode": "complex", "rectangle": [1.0, 40.55, -0.1, 0.9], "max_zeros": 45},
        "output": {"format": "json"},
    },
}

BENCHMARKS = tuple(sorted(_CONFIGS))


def _reference_data() -> dict:
    with resources.files("nsbf").joinpath("reference_values.json").open() as fh:
        return json.load(fh)


def benchmark_config(name: str) -> ProblemConfig:
    if name not in _CONFIGS:
        raise ConfigError(f"unknown benchmark {name!r}; available: {', '.join(BENCHMARKS)}")
    return parse_config_dict(_CONFIGS[name])


@dataclass
class BenchmarkRow:
    index: int
    expected: complex
    got: complex
    error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.error <= self.tolerance


@dataclass
class BenchmarkReport:
    name: str
    source: str
    n_star: int
    rows: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)


def run_benchmark(name: str, grid_n: int | None = None, n_coeffs: int | None = None) -> BenchmarkReport:
    """Solve the named benchmark problem and compare against its references."""
    cfg = benchmark_config(name)
    if grid_n is not None:
        cfg.grid_n = grid_n
    if n_coeffs is not None:
        cfg.n_coeffs = n_coeffs
    ref = _reference_data()[name]
    problem = cfg.to_problem()
    asm = assemble(problem)
    search = cfg.search
    if search.get("mode", "real") == "real":
        omega_max = search.get("omega_max")
        spectrum = find_real_spectrum(
            problem,
            asm.solver,
            count=search.get("count"),
            omega_max=float(omega_max) if omega_max is not None else None,
            nu_max=float(search.get("nu_max", 0.0)),
        )
    else:
        spectrum = find_complex_spectrum(
            problem, asm.solver, tuple(search["rectangle"]), int(search.get("max_zeros", 100))
        )

    rows = []
    lam = spectrum.lambdas
    for key, (re, im) in sorted(ref["eigenvalues"].items(), key=lambda kv: int(kv[0])):
        idx = int(key)
        expected = complex(re, im)
        if idx >= len(lam):
            rows.append(BenchmarkRow(idx, expected, complex("nan"), float("inf"), 0.0))
            continue
        got = complex(lam[idx])
        err = abs(got - expected)
        if "tolerance_abs" in ref:
            tol = ref["tolerance_abs"]
        elif "tolerance_abs_by_index" in ref:
            tol = ref["tolerance_abs_by_index"][key]
        else:
            tol = ref["tolerance_rel"] * max(1.0, abs(expected))
        rows.append(BenchmarkRow(idx, expected, got, err, tol))
    return BenchmarkReport(name, ref["source"], asm.selection.n_star, rows)

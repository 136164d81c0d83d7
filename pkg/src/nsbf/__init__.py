"""Solutions of -y'' + q(x) y = w^2 y as Neumann series of spherical Bessel
functions, with coefficients from a stable recurrent integration procedure,
and Sturm-Liouville spectral solvers whose accuracy is uniform in the
spectral parameter."""

from .accuracy import goursat_residuals, kernel1_residuals, residual_table, select_N
from .coefficients import (
    CoefficientSet,
    beta_at,
    beta_via_definition,
    beta_via_direct,
    coefficients_recurrent,
    gamma_at,
    gamma_via_direct,
    legendre_moment,
)
from .config import ProblemConfig, load_config, load_tabulated_potential
from .errors import ConfigError, ExpressionError, NsbfError, NumericalError, VerificationError
from .expressions import evaluate, parse, sample, to_string
from .grid import Grid, SampledFunction, cumulative_integral, make_grid
from .solution import NsbfSolver, SolutionValues
from .special import legendre_sequence, spherical_j_over_z, spherical_j_sequence
from .spectral import (
    BoundaryCondition,
    EigenvalueEntry,
    SpectralProblem,
    Spectrum,
    assemble,
    char_fn,
    eigenfunction,
    find_complex_spectrum,
    find_real_spectrum,
)
from .spps import FormalPowers, ParticularSolution, formal_powers, particular_solution, picard_pair

__version__ = "0.1.0"

__all__ = [
    "BoundaryCondition",
    "CoefficientSet",
    "ConfigError",
    "EigenvalueEntry",
    "ExpressionError",
    "FormalPowers",
    "Grid",
    "NsbfError",
    "NsbfSolver",
    "NumericalError",
    "ParticularSolution",
    "ProblemConfig",
    "SampledFunction",
    "SolutionValues",
    "SpectralProblem",
    "Spectrum",
    "VerificationError",
    "assemble",
    "beta_at",
    "beta_via_definition",
    "beta_via_direct",
    "char_fn",
    "coefficients_recurrent",
    "cumulative_integral",
    "eigenfunction",
    "evaluate",
    "find_complex_spectrum",
    "find_real_spectrum",
    "formal_powers",
    "gamma_at",
    "gamma_via_direct",
    "goursat_residuals",
    "kernel1_residuals",
    "legendre_moment",
    "legendre_sequence",
    "load_config",
    "load_tabulated_potential",
    "make_grid",
    "parse",
    "particular_solution",
    "picard_pair",
    "residual_table",
    "sample",
    "select_N",
    "spherical_j_over_z",
    "spherical_j_sequence",
    "to_string",
]

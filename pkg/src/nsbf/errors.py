"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, NumericalError -> 3,
VerificationError -> 4.
"""


class NsbfError(Exception):
    """Base class for package errors."""


class ConfigError(NsbfError):
    """Invalid configuration, expression, or input file."""


class ExpressionError(ConfigError):
    """Expression syntax or evaluation failure; carries a position when known."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class NumericalError(NsbfError):
    """Non-convergence, overflow, or NaN from a numerical stage."""


class VerificationError(NsbfError):
    """Benchmark result disagrees with its stored reference."""

"""Exception types shared across the package.

Errors that stem from a bad experiment description (rather than a runtime
failure) derive from ``ConfigError`` and carry a machine-readable ``code`` so
the CLI can report them uniformly and exit with status 2.
"""


class ChiraLatticeError(Exception):
    """Base class for all package errors."""


class DimensionError(ChiraLatticeError):
    """A stencil or reduction has an empty or undersized valid index set."""


class DomainError(ChiraLatticeError):
    """An argument is outside the mathematical domain of an operation."""


class ParameterError(ChiraLatticeError):
    """Model parameters are outside the admissible regime."""


class ConfigError(ChiraLatticeError):
    """An experiment configuration failed validation (CLI exit status 2)."""

    code = "CONFIG_INVALID"

    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code


class ScalingError(ConfigError):
    """A scaling schedule violates the required decay of (eps, delta, l)."""

    code = "SCALING_VIOLATION"


class OptimizationError(ChiraLatticeError):
    """The descent loop could not make progress (divergent step)."""

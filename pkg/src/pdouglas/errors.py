"""Exception types shared across the library."""


class PDouglasError(Exception):
    """Base class for library errors."""


class InvalidArgumentError(PDouglasError, ValueError):
    """Non-finite or otherwise malformed scalar/array input."""


class DomainError(PDouglasError, ValueError):
    """Point outside the open set where an evaluator is defined."""


class SingularityError(PDouglasError, ValueError):
    """Evaluation requested exactly on a kernel singularity (x = y, z = w)."""


class AliasingError(PDouglasError, ValueError):
    """Sample grid too coarse for the requested truncation order."""


class AccuracyError(PDouglasError, RuntimeError):
    """Quadrature or extrapolation failed to meet its error target.

    Carries a ``diagnostics`` dict describing the offending cells/levels.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ConfigurationError(PDouglasError, ValueError):
    """Missing optional data (e.g. a derivative) required by an operation."""


class UnsupportedInputError(PDouglasError, ValueError):
    """Input outside the supported class (non-Lipschitz data, bad preset)."""


class PreconditionError(PDouglasError, ValueError):
    """A stated precondition failed (e.g. boundary values not zero)."""


class NonTerminationError(PDouglasError, RuntimeError):
    """Random-walk step cap exceeded."""

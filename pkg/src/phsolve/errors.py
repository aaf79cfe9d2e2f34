"""Exception hierarchy shared by all phsolve modules."""


class PhsolveError(Exception):
    """Base class for every error raised by phsolve."""


class ConfigurationError(PhsolveError, ValueError):
    """Invalid grid, model parameters or run configuration."""


class NumericalError(PhsolveError, ArithmeticError):
    """Base class for failures that happen while evaluating or solving."""


class EvaluationError(NumericalError):
    """A model function overflowed at some argument."""


class ConditioningError(NumericalError):
    """An exponent guard (similarity scaling or metric) was exceeded."""


class SolverError(NumericalError):
    """An eigensolver did not converge or received a non-finite matrix."""


class UnsupportedModelError(PhsolveError, NotImplementedError):
    """The requested construction is not available for this model."""

"""Exception hierarchy shared across the package."""


class RMTLabError(Exception):
    """Base class for all package errors."""


class PreconditionError(RMTLabError, ValueError):
    """An operation was called outside its documented domain."""


class InfeasibleParametersError(RMTLabError, ValueError):
    """No entry law with zero mean and unit variance exists for the parameters."""


class ResourceError(RMTLabError, MemoryError):
    """A matrix would exceed the declared memory budget."""


class EigensolverError(RMTLabError, RuntimeError):
    """The iterative eigensolver failed to converge."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class TrialError(RMTLabError, RuntimeError):
    """A Monte Carlo trial failed; carries the failing trial index."""

    def __init__(self, trial_index, cause):
        super().__init__(f"trial {trial_index} failed: {cause}")
        self.trial_index = trial_index
        self.cause = cause

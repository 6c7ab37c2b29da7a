"""Exception types shared across the package."""


class NumericalFailure(RuntimeError):
    """A solver could not produce a trustworthy result.

    ``diagnostic`` carries whatever context helps reproduce the failure
    (a residual, a convergence table, ...).
    """

    def __init__(self, message, diagnostic=None):
        super().__init__(message)
        self.diagnostic = diagnostic


class UndefinedCorrelation(ValueError):
    """A normalized correlation was requested for a (near) vacuum state."""


class IncompleteRecord(ValueError):
    """An observable record lacks data required by the requested analysis."""


class ConfigError(ValueError):
    """Invalid or unknown configuration input."""

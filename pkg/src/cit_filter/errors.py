"""Exception hierarchy shared by all modules."""


class CitFilterError(Exception):
    """Base class for every error raised by this package."""


class DomainError(CitFilterError, ValueError):
    """A quantity was requested outside its mathematical domain."""


class CapacityError(CitFilterError, ValueError):
    """A requested Hilbert space or grid exceeds the configured budget."""


class SetupError(CitFilterError, ValueError):
    """Inconsistent initial data or run configuration."""


class ConfigError(CitFilterError, ValueError):
    """Invalid configuration file or key."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class NumericalError(CitFilterError, RuntimeError):
    """Integration produced NaN, blew up, or violated a stability bound."""


class WindowError(CitFilterError, ValueError):
    """A fit window does not satisfy its preconditions."""


class ExtractionError(CitFilterError, ValueError):
    """No delay could be extracted from a time series."""


class DerivationError(CitFilterError, RuntimeError):
    """Equation-of-motion coefficients disagree with the lattice oracle."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}

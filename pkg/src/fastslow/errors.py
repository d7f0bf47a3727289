"""Exception hierarchy shared across the package."""


class FastSlowError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(FastSlowError):
    """Invalid parameter or configuration value."""


class ShapeError(FastSlowError):
    """Array length / grid mismatch between operands."""


class DomainError(FastSlowError):
    """Input outside the admissible region (negative v, ordering violation)."""


class DivergenceError(FastSlowError):
    """A time integration blew up.  Carries the time of failure."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class SplittingError(FastSlowError):
    """Degenerate fast/slow splitting (non-positive spectral gap)."""


class HorizonError(FastSlowError):
    """Backward horizon too short for the requested tolerance."""


class ContractionError(FastSlowError):
    """Fixed-point iteration failed to contract.  Carries the gap report."""

    def __init__(self, message, gap_report=None):
        super().__init__(message)
        self.gap_report = gap_report

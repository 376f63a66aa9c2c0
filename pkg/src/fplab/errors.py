"""Exception types shared across the package."""


class FplabError(Exception):
    """Base class for all package-specific errors."""


class DomainError(FplabError, ValueError):
    """Evaluation outside the mathematical domain (typically t <= 0)."""


class ScaleInvarianceError(FplabError, ValueError):
    """Potential exponents violate the scale-invariance condition q = -p/2."""


class NormalizabilityError(FplabError, ValueError):
    """Density cannot be normalized.  Carries a machine-readable reason code."""

    def __init__(self, message: str, reason: str = "not_normalizable"):
        super().__init__(message)
        self.reason = reason


class NumericalError(FplabError, RuntimeError):
    """Quadrature or linear-algebra failure."""


class DivergenceError(NumericalError):
    """Time stepping produced non-finite values.  Carries the step index."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


class RangeError(FplabError, OverflowError):
    """Exponential argument outside the double-precision range."""


class OrderError(FplabError, LookupError):
    """Requested perturbation order is not stored or not supported."""


class ConfigError(FplabError, ValueError):
    """Invalid run configuration.  Carries the offending field path."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field

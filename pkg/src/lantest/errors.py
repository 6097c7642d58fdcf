"""Exception hierarchy shared by every module of the package."""


class LanError(Exception):
    """Base class for all package errors."""


class DomainError(LanError, ValueError):
    """An argument lies outside the domain of the operation."""


class StationarityError(DomainError):
    """Autoregressive coefficients do not define a stationary process."""


class DegenerateDesignError(LanError, ValueError):
    """The lagged design carries no information (zero energy or rank deficient)."""


class InsufficientDataError(LanError, ValueError):
    def __init__(self, required: int, available: int):
        self.required = required
        self.available = available
        super().__init__(
            f"extended estimator needs N={required} observations, source holds {available}"
        )


class ConditionViolation(LanError, ArithmeticError):
    """Gradient of the central sequence vanishes where a correction needs it."""


class DegenerateVarianceError(LanError, ArithmeticError):
    """Plug-in variance is zero, so the statistic cannot be standardized."""


class NumericError(LanError, ArithmeticError):
    """Quadrature or recursion failed numerically."""


class ExperimentError(LanError, RuntimeError):
    """Too many replicates of a Monte Carlo experiment failed."""


class ConfigError(LanError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)

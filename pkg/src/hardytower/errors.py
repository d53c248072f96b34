"""Exception hierarchy shared by the symbolic and numeric layers."""


class HardyTowerError(Exception):
    """Base class for all package errors."""


class ZeroDivisionInField(HardyTowerError, ZeroDivisionError):
    """Division by (or logarithmic derivative of) the zero element."""


class UnsupportedComposition(HardyTowerError):
    """Composition with log/exp would leave the monomial lattice."""


class UnsupportedPower(HardyTowerError):
    """A rational power that has no exact representative in the field."""


class CacheBoundError(HardyTowerError, IndexError):
    """A tower index exceeds the configured cache bound."""


class ParseError(HardyTowerError):
    """Syntax error in the expression grammar, with a character position."""

    def __init__(self, message: str, position: int | None = None, text: str | None = None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class LoweringError(HardyTowerError):
    """A syntactically valid expression that has no value in the field."""

    def __init__(self, message: str, subterm: str | None = None):
        self.subterm = subterm
        if subterm is not None:
            message = f"{message}: {subterm}"
        super().__init__(message)


class DomainError(HardyTowerError, ValueError):
    """Numeric evaluation below the point where all iterated logs are positive."""

    def __init__(self, message: str, threshold: float | None = None):
        self.threshold = threshold
        super().__init__(message)


class PoleError(HardyTowerError, ArithmeticError):
    """A denominator is numerically indistinguishable from zero."""


class StepSizeUnderflow(HardyTowerError, RuntimeError):
    """The adaptive integrator could not meet the tolerance."""


class NotApplicable(HardyTowerError):
    """The hypothesis of a bound does not hold on the sampled data."""

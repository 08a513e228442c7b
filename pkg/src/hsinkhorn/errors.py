"""Exception hierarchy. Each class carries the CLI exit code for its error class."""


class HSinkhornError(Exception):
    exit_code = 1


class ValidationError(HSinkhornError, ValueError):
    """Bad input: malformed vectors, grids, or sizes."""

    exit_code = 2


class ZeroMassPart(ValidationError):
    """A requested sign part of a signal carries no mass."""


class OutOfRange(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


class BadSize(ValidationError):
    """Grid size is not n_min * 2**m."""


class UnknownSmoothness(ValidationError):
    """No built-in asymptotic-smoothness constants for this cost."""


class MaxIterExceeded(HSinkhornError):
    exit_code = 3

    def __init__(self, message, residual=float("nan"), iterations=0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class NumericalError(HSinkhornError, ArithmeticError):
    exit_code = 4


class NonpositiveDenominator(NumericalError):
    pass


class DivergentRank(NumericalError):
    pass

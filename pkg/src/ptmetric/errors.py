"""Exception hierarchy.

Domain errors signal physics (exceptional points, ill-conditioned metrics)
and map to CLI exit code 1; usage errors map to exit code 2.
"""


class PTMError(Exception):
    """Base class for every error raised by ptmetric."""


class DomainError(PTMError):
    pass


class UsageError(PTMError, ValueError):
    pass


class NotHermitian(UsageError):
    pass


class NotPositiveDefinite(DomainError):
    pass


class NoConvergence(DomainError):
    pass


class DefectivePencil(DomainError):
    """Inverse iteration could not produce a full set of independent eigenvectors."""


class ExceptionalPoint(DomainError):
    pass


class IllConditioned(DomainError):
    pass


class DegenerateVariance(DomainError):
    pass


class CrossCheckFailed(DomainError):
    pass


class OutOfDomain(UsageError):
    pass


class DimensionMismatch(UsageError):
    pass


class ZeroVector(UsageError):
    pass


class ZeroOperator(UsageError):
    pass


class NotNormalized(UsageError):
    pass


class BadDimension(UsageError):
    pass


class MissingMetric(UsageError):
    pass


class IncompleteGrid(UsageError):
    pass


class BadBracket(UsageError):
    pass


class NotSquare(UsageError):
    pass


class ParseError(UsageError):
    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column

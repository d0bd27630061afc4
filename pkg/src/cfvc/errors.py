"""Exception hierarchy shared by every module."""


class CfvcError(Exception):
    """Base class for all errors raised by the package."""


# numerics
class DimensionMismatch(CfvcError, ValueError):
    pass


class RankDeficient(CfvcError, ValueError):
    pass


class NonSquare(CfvcError, ValueError):
    pass


class NoConvergence(CfvcError, ArithmeticError):
    pass


class NotPositiveDefinite(CfvcError, ValueError):
    pass


class InvalidDof(CfvcError, ValueError):
    pass


# series
class NonPositiveValue(CfvcError, ValueError):
    def __init__(self, month, value):
        super().__init__(f"non-positive value {value!r} at {month}")
        self.month = month
        self.value = value


class SeriesTooShort(CfvcError, ValueError):
    pass


class Misaligned(CfvcError, ValueError):
    pass


class ConstantSeries(CfvcError, ValueError):
    pass


# ingestion
class RowError(CfvcError, ValueError):
    """A malformed input row; ``line`` is 1-based and counts the header."""

    def __init__(self, line, message):
        super().__init__(f"line {line}: {message}")
        self.line = line


class SchemaViolation(RowError):
    pass


class BadDate(RowError):
    pass


class NegativeAmount(RowError):
    pass


class EmptyInput(CfvcError, ValueError):
    pass


class MissingRoundType(CfvcError, ValueError):
    pass


class InvertedWindow(CfvcError, ValueError):
    pass


# statistics
class InvalidSpec(CfvcError, ValueError):
    pass


class UnsupportedSpec(CfvcError, ValueError):
    pass


class SingularCovariance(CfvcError, ArithmeticError):
    pass


class SingularMoments(CfvcError, ArithmeticError):
    pass


class BadOrdering(CfvcError, ValueError):
    pass


class NonFiniteReplicate(CfvcError, ArithmeticError):
    pass


class UnstableParameters(CfvcError, ValueError):
    pass


# pipeline
class ConfigInvalid(CfvcError, ValueError):
    pass

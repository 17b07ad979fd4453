"""Exception hierarchy shared across walkerlab."""
from __future__ import annotations


class WalkerlabError(Exception):
    """Base class for every error raised by walkerlab."""


class ArithmeticDomainError(WalkerlabError, ArithmeticError):
    pass


class DivisionByZero(ArithmeticDomainError, ZeroDivisionError):
    pass


class MixedRadicands(ArithmeticDomainError):
    """Two distinct square-free radicands were needed in one computation."""


class NegativeSqrt(ArithmeticDomainError, ValueError):
    pass


class UnsupportedAlgebraicDegree(ArithmeticDomainError):
    """An irreducible factor outside the supported scalar tower remains."""

    def __init__(self, message: str, remainder=None):
        super().__init__(message)
        self.remainder = remainder


class NotAnEigenvalue(WalkerlabError, ValueError):
    pass


class ExprSyntaxError(WalkerlabError, SyntaxError):
    """Parse failure in an expression or catalog file."""

    def __init__(self, message: str, offset: int = 0, line: int | None = None, column: int | None = None):
        loc = f" at offset {offset}" if line is None else f" at line {line}, column {column}"
        super().__init__(message + loc)
        self.msg = message
        self.offset = offset
        self.lineno = line
        self.column = column
        self.text_with_location = message + loc

    def __str__(self):
        return self.text_with_location


class UnboundParameter(WalkerlabError, KeyError):
    pass


class DuplicateId(WalkerlabError, ValueError):
    pass


class ModelError(WalkerlabError, ValueError):
    """Base for validation failures raised by instantiate()."""


class ConstraintViolated(ModelError):
    pass


class JacobiFailed(ModelError):
    pass


class MetricDegenerate(ModelError):
    pass


class NotReductive(ModelError):
    pass


class MetricNotIsotropyInvariant(ModelError):
    pass


class StubEntry(ModelError):
    pass


class ExprValueError(WalkerlabError, ValueError):
    """Well-formed expression that cannot be used where it appears."""

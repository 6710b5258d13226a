"""Exception hierarchy shared by every module of the package."""


class ReynoldsError(Exception):
    """Base class for all errors raised by this package."""


class NonInvertible(ReynoldsError, ArithmeticError):
    """A series (or kernel factor) with zero constant term was inverted."""


class OrderError(ReynoldsError, ValueError):
    """A computation asked for coefficients beyond the trusted order."""


class PreconditionViolated(ReynoldsError, ValueError):
    pass


class IndexOverflow(ReynoldsError, IndexError):
    """An algebra product left the enumerated basis range."""


class AlgebraMismatch(ReynoldsError, TypeError):
    pass


class MissingOperator(ReynoldsError, LookupError):
    """An identity needs an operator (usually D) the model does not carry."""


class EmbeddingUndefined(ReynoldsError, KeyError):
    pass


class UnboundSymbol(ReynoldsError, NameError):
    pass


class UnsupportedNode(ReynoldsError, TypeError):
    pass


class ExprSyntaxError(ReynoldsError, SyntaxError):
    """Parse failure; carries the byte ``offset`` and the ``expected`` token set."""

    def __init__(self, message, offset, expected=()):
        expected = tuple(sorted(set(expected)))
        detail = f"{message} at offset {offset}"
        if expected:
            detail += f" (expected one of: {', '.join(expected)})"
        super().__init__(detail)
        self.offset = offset
        self.expected = expected

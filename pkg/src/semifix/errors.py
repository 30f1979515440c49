"""Exception types shared across the package."""


class SemifixError(Exception):
    """Base class for all errors raised by semifix."""


class InvalidParameter(SemifixError):
    """An argument is outside its documented domain."""


class MalformedElement(SemifixError):
    """A literal or element value does not belong to the carrier."""


class UnsupportedOperation(SemifixError):
    """The operation needs an enumerable carrier and the semiring has none."""


class NotNaturallyOrdered(SemifixError):
    """The additive preorder of the semiring is not antisymmetric."""


class ParseError(SemifixError):
    """Lexical, syntactic or semantic error in a program or facts file."""

    def __init__(self, message, line=None, col=None):
        self.message = message
        self.line = line
        self.col = col
        if line is not None:
            message = f"line {line}, col {col}: {message}"
        super().__init__(message)


class GroundingError(SemifixError):
    """The program and database cannot be grounded to a system."""


class EnumerationBudgetExceeded(SemifixError):
    """Walk enumeration would exceed the configured budget."""


class InvalidWalk(SemifixError):
    """An edge multiset does not form a connected walk."""


class NotReassemblable(SemifixError):
    """The remaining edges do not admit a walk between the endpoints."""

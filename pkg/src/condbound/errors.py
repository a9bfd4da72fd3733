class ConductorBoundError(Exception):
    """Base class for all errors raised by condbound."""


class ValidationError(ConductorBoundError, ValueError):
    pass


class NumericalError(ConductorBoundError, ArithmeticError):
    pass


class ZeroFunction(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class MalformedRecord(ValidationError):
    pass


class NonMonicPolynomial(MalformedRecord):
    pass


class ZeroDiscriminant(MalformedRecord):
    pass


class ToleranceNotReached(NumericalError):
    pass


class NotPositiveDefinite(NumericalError):
    pass


class UnresolvedSubfieldLabel(UserWarning):
    pass

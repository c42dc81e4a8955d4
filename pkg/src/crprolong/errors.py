"""Exception types shared across the package."""


class CrprolongError(Exception):
    """Base class for all library errors."""


class ParseError(CrprolongError):
    def __init__(self, message: str, position: int = -1, source: str = ""):
        self.position = position
        self.source = source
        where = f" at position {position}" if position >= 0 else ""
        super().__init__(f"{message}{where}")


class SqrtPresent(CrprolongError):
    """Raised when an exact rational normal form is requested for a sqrt-bearing expression."""


class DivisionByZeroPolynomial(CrprolongError, ZeroDivisionError):
    pass


class NegativeSqrtArgument(CrprolongError, ValueError):
    pass


class PoleAtPoint(CrprolongError, ZeroDivisionError):
    pass


class NoValidSamplePoint(CrprolongError):
    pass


class ConstraintViolated(CrprolongError):
    pass


class SingularFrameAt0(CrprolongError):
    pass


class SqrtCoefficientsUnsupported(CrprolongError):
    pass


class NotTangent(CrprolongError):
    pass


class NotOnSurface(CrprolongError):
    pass


class NonTermination(CrprolongError):
    pass


class ReductionOrderInsufficient(CrprolongError):
    pass


class InputError(CrprolongError):
    """Malformed input file (bad JSON, unknown keys, bad shapes)."""

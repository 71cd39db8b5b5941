"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class PrimeSumsError(Exception):
    """Base class for all library errors."""


class InvalidRange(PrimeSumsError, ValueError):
    pass


class RangeTooLarge(PrimeSumsError):
    pass


class UnknownFunction(PrimeSumsError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown function"


class InvalidParams(PrimeSumsError, ValueError):
    pass


class HypothesisViolation(PrimeSumsError):
    """The function does not satisfy the hypotheses an estimator needs."""


class MaxSubdivisionsExceeded(PrimeSumsError):
    pass


class ResourceLimit(PrimeSumsError):
    """A value left the representable range or a configured budget."""

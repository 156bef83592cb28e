"""Exception hierarchy shared by every module of the package."""


class HolderDecayError(Exception):
    """Base class for all errors raised by ``holderdecay``."""


class InvalidInputError(HolderDecayError, ValueError):
    """Malformed arguments: wrong sizes, nonpositive values, bad probability vectors."""


class DomainError(HolderDecayError, ValueError):
    """An argument lies outside the domain on which a function is defined."""


class InvalidWeightError(InvalidInputError):
    """A weight does not have the monotonicity/convexity the construction needs."""


class UnsupportedError(HolderDecayError, ValueError):
    """Parameter combination for which the construction is not valid (e.g. p < 1)."""


class NoBracketError(HolderDecayError, ValueError):
    """Bisection could not bracket the requested value."""


class InvalidFunctionError(HolderDecayError, ValueError):
    """A function declared monotone was observed not to be."""


class RationalLocationError(InvalidInputError):
    """The damper location is (numerically) rational."""


class StepFailureError(HolderDecayError, ArithmeticError):
    """The implicit time step could not be solved."""


class InternalConsistencyError(HolderDecayError, AssertionError):
    """A bound that holds by construction was violated numerically."""

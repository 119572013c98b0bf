"""Exception types shared across the package."""


class QadicError(Exception):
    """Base class for all package-specific errors."""


class Infeasible(QadicError):
    """No parameter choice satisfies the required bounds.

    Raised by the parameter builders when the requested (p, n, k, beta)
    combination admits no radix; the caller must lower n or k.
    """


class ParamsViolation(QadicError):
    """An input exceeds what the supplied parameters guarantee exact."""


class PackOverflow(QadicError):
    """A packed value would exceed the mantissa/word budget 2**beta."""


class DimensionMismatch(QadicError):
    """Matrix or vector shapes are incompatible."""


class MemoryBudgetExceeded(QadicError):
    """A lookup table would exceed the configured entry budget."""


class NotIrreducible(QadicError):
    """A user-supplied modulus polynomial has a nontrivial factor."""


class NoGeneratorFound(QadicError):
    """The generator search exhausted its candidates."""


class TooLarge(QadicError):
    """Field order exceeds the table-memory guard."""

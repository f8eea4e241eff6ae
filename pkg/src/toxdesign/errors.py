"""Exception types raised by toxdesign."""


class ToxDesignError(Exception):
    """Base class for all package errors."""


class DomainError(ToxDesignError, ValueError):
    """An argument lies outside the admissible domain (dose, parameter, alpha)."""


class NoRootInInterval(ToxDesignError, ValueError):
    """The effective dose does not lie in the dose interval [0, 1]."""


class DegenerateDenominator(ToxDesignError, ValueError):
    """A variance denominator vanished or became negative at a support point."""


class NotEstimable(ToxDesignError, ArithmeticError):
    """The target gradient is outside the column space of the information matrix."""


class EmptyDesign(ToxDesignError, ValueError):
    pass


class NegativeWeight(ToxDesignError, ValueError):
    pass


class DoseOutOfRange(DomainError):
    pass


class CertificationFailed(ToxDesignError, RuntimeError):
    """The optimizer could not certify its best design via the equivalence theorem.

    The best design found is kept on ``result`` for diagnosis.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result

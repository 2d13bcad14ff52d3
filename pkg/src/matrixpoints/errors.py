"""Exception hierarchy.

Everything raised on purpose by the library derives from ``MatrixPointsError``
so the CLI can map it to exit code 1. ``FormulaError`` subclasses mark a
failed exactness certificate (a count formula that did not come out as a
rational integer) and are never expected on valid input.
"""


class MatrixPointsError(Exception):
    """Base class for domain errors."""


class DomainError(MatrixPointsError, ValueError):
    """An argument lies outside the domain of the operation."""


class NotPrime(DomainError):
    pass


class DenominatorVanishes(DomainError):
    pass


class NotInvertible(DomainError, ZeroDivisionError):
    pass


class BadReduction(DomainError):
    pass


class BadPrime(DomainError):
    pass


class RamifiedPrime(DomainError):
    pass


class HasseViolation(DomainError):
    pass


class PartsMismatch(DomainError):
    pass


class ContextMismatch(DomainError):
    pass


class NotSupersingular(DomainError):
    pass


class EmptySample(DomainError):
    pass


class BudgetExceeded(MatrixPointsError):
    pass


class FormulaError(MatrixPointsError, ArithmeticError):
    pass


class NonIntegral(FormulaError):
    pass


class NonRealResult(FormulaError):
    pass

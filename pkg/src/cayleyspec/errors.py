"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class CayleySpecError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class InvalidOrder(CayleySpecError):
    pass


class NotLatinSquare(CayleySpecError):
    pass


class NotAssociative(CayleySpecError):
    pass


class NoIdentity(CayleySpecError):
    pass


class NotInvertible(CayleySpecError):
    pass


class AlphabetMismatch(CayleySpecError):
    pass


class LevelTooLarge(CayleySpecError):
    """Raised when n**k exceeds the configured memory budget."""


class PoleInRecursion(CayleySpecError):
    """Some F_i vanished along the continued-fraction recursion."""


class NoConvergence(CayleySpecError):
    pass


class BudgetExceeded(CayleySpecError):
    pass


class HypothesisNotSatisfied(CayleySpecError):
    pass


class MissingVariable(CayleySpecError):
    pass

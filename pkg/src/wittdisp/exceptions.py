from typing import Any, Optional


class WittDispError(Exception):
    pass


class PreconditionError(WittDispError):
    pass


class ResourceCap(WittDispError):
    pass


class ConfigError(PreconditionError):
    pass


class BadSpec(PreconditionError):
    pass


class NonUnit(PreconditionError):
    pass


class MixedRings(PreconditionError):
    pass


class Unenumerable(PreconditionError):
    pass


class IntegralityFailure(WittDispError):
    pass


class IndexOutOfRange(PreconditionError):
    pass


class LengthUnderflow(PreconditionError):
    pass


class NotInIdeal(PreconditionError):
    pass


class NotInHmu(PreconditionError):
    pass


class NotLocal(PreconditionError):
    pass


class NotInSubgroup(PreconditionError):
    pass


class NotAField(PreconditionError):
    pass


class CharNotP(PreconditionError):
    pass


class NotInJb(PreconditionError):
    pass


class NotReduced(PreconditionError):
    pass


class BadDecomposition(PreconditionError):
    pass


class NotCongruent(PreconditionError):
    pass


class UnsupportedIdeal(PreconditionError):
    pass


class InsufficientPrecision(PreconditionError):
    def __init__(self, message: str, needed: Optional[int] = None):
        super().__init__(message)
        self.needed = needed


class NotAdjointNilpotent(PreconditionError):
    def __init__(self, message: str, evidence: Optional[Any] = None):
        super().__init__(message)
        self.evidence = evidence


class SearchSpaceTooLarge(ResourceCap):
    def __init__(self, message: str, size: Optional[int] = None, cap: Optional[int] = None):
        super().__init__(message)
        self.size = size
        self.cap = cap

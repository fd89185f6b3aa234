"""Exception types shared across the library."""


class EllrcError(Exception):
    """Base class for all library errors."""


class NotPrime(EllrcError):
    pass


class FieldTooLarge(EllrcError):
    pass


class DivisionByZero(EllrcError):
    pass


class NoSuchRoot(EllrcError):
    pass


class SingularCurve(EllrcError):
    pass


class StructureInconsistent(EllrcError):
    pass


class NoSuchSubgroup(EllrcError):
    pass


class NoCurveFound(EllrcError):
    pass


class ZeroDenominator(EllrcError):
    pass


class PoleError(EllrcError):
    pass


class PrecisionExhausted(EllrcError):
    pass


class NotAnEndomorphism(EllrcError):
    pass


class DegenerateDivisor(EllrcError):
    pass


class NotInSpace(EllrcError):
    pass


class UnsupportedFamily(EllrcError):
    pass


class NotASubgroup(EllrcError):
    pass


class InvariantSpaceDimension(EllrcError):
    pass


class ExistenceFailure(EllrcError):
    pass


class NotEnoughFibers(EllrcError):
    pass


class RankMismatch(EllrcError):
    pass


class SubgroupsIntersect(EllrcError):
    pass


class TorsionConditionFailed(EllrcError):
    pass


class SingularRepairMatrix(EllrcError):
    pass


class MissingSymbols(EllrcError):
    pass


class BudgetExceeded(EllrcError):
    pass


class HypothesisViolation(EllrcError):
    """A construction hypothesis (h || N, Eq.-style conditions, ...) failed."""

"""Exception hierarchy shared across the package."""


class PolycltError(Exception):
    """Base class for all errors raised by polyclt."""


class DimensionMismatch(PolycltError):
    pass


class SingularBasis(PolycltError):
    """Numerically singular simplex basis; reported, not silently repaired."""


class NotCompact(PolycltError):
    pass


class EmptyInterior(PolycltError):
    pass


class NotPositivized(PolycltError):
    pass


class DomainViolation(PolycltError):
    """Dual iterate left the domain where all rates are positive."""


class InfeasiblePoint(PolycltError):
    pass


class GramSingular(PolycltError):
    """Near-degenerate constraints: the scaled Gram matrix is numerically singular."""


class PartitionNotFound(PolycltError):
    """Heuristic failed to certify a column partition; not a proof of impossibility."""


class RankDeficient(PolycltError):
    pass


class StartNotInterior(PolycltError):
    pass


class QuadratureBudgetExceeded(PolycltError):
    pass


class DenominatorTooSmall(PolycltError):
    pass


class DimensionTooLarge(PolycltError):
    pass


class BoxUnboundedWithoutDecay(PolycltError):
    pass


class SigmaZero(PolycltError):
    pass


class TooFewSamples(PolycltError):
    pass


class SupportViolation(PolycltError):
    pass

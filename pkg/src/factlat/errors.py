"""Exception hierarchy shared by every module of the package."""


class FactlatError(Exception):
    """Base class for all library errors."""


class MalformedPartition(FactlatError, ValueError):
    pass


class GroundMismatch(FactlatError, ValueError):
    pass


class NotPermuting(FactlatError, ValueError):
    pass


class EmptySubset(FactlatError, ValueError):
    pass


class NotFactorPair(FactlatError, ValueError):
    pass


class NotRegular(FactlatError, ValueError):
    pass


class NotOrthogonal(FactlatError, ValueError):
    pass


class LimitExceeded(FactlatError):
    pass


class NotApplicable(FactlatError):
    pass


class NotDivisible(FactlatError, ValueError):
    pass


class NotNRelation(FactlatError, ValueError):
    pass


class Not2Relation(FactlatError, ValueError):
    pass


class NotBlockUnion(FactlatError, ValueError):
    pass


class NoOverlap(FactlatError):
    pass


class OddBlockCount(FactlatError, ValueError):
    pass


class NotSharedBlock(FactlatError, ValueError):
    pass


class ClausesUnsatisfied(FactlatError, ValueError):
    pass


class BadIndex(FactlatError, ValueError):
    pass


class NotPAtom(FactlatError, ValueError):
    pass


class ProfileMismatch(FactlatError, ValueError):
    pass


class TooLarge(FactlatError):
    pass


class PipelineError(FactlatError):
    """Raised when the reconstruction pipeline meets a map that is not
    induced by a permutation of the ground set."""


class InconsistentFirstComponents(PipelineError):
    pass


class PipelineHypothesisFailure(PipelineError):
    pass


class ChoiceInconsistency(PipelineError):
    pass


class WitnessIntersectionNotSingleton(PipelineError):
    pass


class AuditFailure(PipelineError):
    pass


class VerificationFailure(PipelineError):
    pass

"""Exception hierarchy shared by every module of the package."""


class MisspecError(Exception):
    """Base class for all package errors."""


class SchemaError(MisspecError):
    """A configuration document does not follow the expected layout."""


class ValidationError(MisspecError):
    """An environment invariant is violated; ``invariant`` names it."""

    def __init__(self, invariant, message):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


class UnknownAction(MisspecError, KeyError):
    pass


class DomainError(MisspecError, ValueError):
    pass


class SupportError(MisspecError, ValueError):
    pass


class NonUniqueMinimizer(MisspecError):
    pass


class GridMismatch(MisspecError, ValueError):
    pass


class ZeroLikelihood(MisspecError):
    pass


class NoObservations(MisspecError):
    pass


class UnsupportedBeliefReduction(MisspecError):
    pass


class EmptyActionSet(MisspecError, ValueError):
    pass


class UnsupportedSize(MisspecError, ValueError):
    pass


class NonConvergence(MisspecError):
    pass


class EmptyHistory(MisspecError, ValueError):
    pass


class TooShort(MisspecError, ValueError):
    pass


class CoverageError(MisspecError, ValueError):
    pass


class StepTooLarge(MisspecError):
    pass


class NonFiniteState(MisspecError, FloatingPointError):
    pass


class NotAnEquilibrium(MisspecError, ValueError):
    pass


class MissingBasin(MisspecError, ValueError):
    pass


class IdentifiabilityFailure(MisspecError):
    pass


class MonotonicityViolation(MisspecError, ValueError):
    pass


class ResolutionTooCoarse(MisspecError):
    pass


class UnknownPreset(MisspecError, KeyError):
    pass

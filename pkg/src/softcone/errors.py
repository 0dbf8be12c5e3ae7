"""Exception hierarchy for softcone."""


class SoftConeError(Exception):
    """Base class for every error raised by the library."""


class MismatchedParameters(SoftConeError, ValueError):
    pass


class MismatchedDimension(SoftConeError, ValueError):
    pass


class MismatchedUniverse(SoftConeError, ValueError):
    pass


class MissingOperand(SoftConeError, ValueError):
    pass


class EmptySlice(SoftConeError, ValueError):
    pass


class EnumerationTooLarge(SoftConeError, ValueError):
    pass


class EmptyCollection(SoftConeError, ValueError):
    pass


class EmptySequence(SoftConeError, ValueError):
    pass


class NonFiniteResult(SoftConeError, ArithmeticError):
    pass


class UnsupportedProperty(SoftConeError, ValueError):
    pass


class UnsupportedCone(SoftConeError, ValueError):
    pass


class NegativeAlpha(SoftConeError, ValueError):
    pass


class MissingLabel(SoftConeError, ValueError):
    pass


class CNotInterior(SoftConeError, ValueError):
    """The radius ``c`` passed to a convergence test is not interior to the cone."""


class ConeNotNormal(SoftConeError, ValueError):
    pass


class D4Violated(SoftConeError):
    """A metric's value at one label depends on coordinates at other labels.

    ``witness`` holds ``(label, (x1, y1), (x2, y2))``: two argument pairs that
    agree at ``label`` yet produce different metric values there.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class SpecError(SoftConeError, ValueError):
    """Contraction constants or stop criteria are out of range."""


class MapDomainError(SoftConeError):
    pass


class SolverError(SoftConeError):
    """Base for solver outcomes that carry a partial certificate."""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class BallPreconditionFailed(SolverError):
    pass


class MaxIterExceeded(SolverError):
    pass


class ContractionRefuted(SolverError):
    pass


class FixedPointNotSharedByT(SolverError):
    pass

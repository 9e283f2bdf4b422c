"""Exception hierarchy shared by all coordlqr modules."""


class CoordLQRError(Exception):
    """Base class for every error raised by coordlqr."""


class ValidationError(CoordLQRError, ValueError):
    """Bad input data: shapes, values or violated preconditions."""


class NumericalError(CoordLQRError, ArithmeticError):
    """A numerical procedure failed on otherwise valid input."""


class DimensionMismatch(ValidationError):
    pass


class NonFiniteInput(ValidationError):
    pass


class NotUnitNorm(ValidationError):
    pass


class NonPositiveWeight(ValidationError):
    pass


class NotOrthonormal(ValidationError):
    pass


class AssumptionViolated(ValidationError):
    """Stabilizability / PBH type hypotheses do not hold."""


class NotStabilizable(AssumptionViolated):
    pass


class NotMinimalWeight(ValidationError):
    pass


class TooLarge(ValidationError):
    pass


class NotHurwitz(ValidationError):
    """A matrix required to be Hurwitz is not.

    ``eigenvalue`` holds the offending eigenvalue (largest real part)
    when it is known.
    """

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class UnstableClosedLoop(NotHurwitz):
    pass


class NoStabilizingSolution(NumericalError):
    pass


class SingularDCGain(NumericalError):
    pass


class InternalConsistencyError(NumericalError):
    """A result contradicts a property that theory guarantees."""


class SweepError(NumericalError):
    """A sweep point failed; ``lam`` is the offending parameter value."""

    def __init__(self, lam, cause):
        super().__init__(f"sweep failed at lambda={lam!r}: {cause}")
        self.lam = lam
        self.cause = cause

"""Exception hierarchy shared across the package."""


class TorsionDensityError(Exception):
    """Base class for every error raised by this package."""


class OrderExceedsCap(TorsionDensityError):
    pass


class NotMonic(TorsionDensityError):
    pass


class NotInvariant(TorsionDensityError):
    pass


class NotFiniteOrder(TorsionDensityError):
    pass


class GroupTooLarge(TorsionDensityError):
    pass


class InfiniteOrderGenerator(TorsionDensityError):
    pass


class DimensionNotOdd(TorsionDensityError):
    pass


class DimensionMismatch(TorsionDensityError):
    pass


class NotUnimodular(TorsionDensityError):
    pass


class BallTooLarge(TorsionDensityError):
    def __init__(self, message, radius=None):
        super().__init__(message)
        self.radius = radius


class InsufficientData(TorsionDensityError):
    pass


class EmptyCoset(TorsionDensityError):
    pass


class EigenvalueOnePresent(TorsionDensityError):
    pass


class ConstructionInvariantFailed(TorsionDensityError):
    pass


class InvalidRational(TorsionDensityError):
    pass


class CatalogValidationFailed(TorsionDensityError):
    pass


class InvalidAlgebra(TorsionDensityError):
    pass


class NotNilpotent(InvalidAlgebra):
    pass


class StepTooHigh(TorsionDensityError):
    pass


class NotAutomorphism(TorsionDensityError):
    pass


class DimensionOutOfRange(TorsionDensityError):
    pass


class NotNonabelian(TorsionDensityError):
    pass


class ParseError(TorsionDensityError):
    pass

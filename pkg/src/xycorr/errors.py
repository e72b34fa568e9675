"""Exception hierarchy for xycorr."""


class XYCorrError(Exception):
    """Base class for all package errors."""


class InvalidState(XYCorrError, ValueError):
    """A matrix failed one of the density-matrix invariants."""

    def __init__(self, invariant, magnitude):
        self.invariant = invariant
        self.magnitude = float(magnitude)
        super().__init__(f"{invariant} violated by {self.magnitude:.3e}")


class NotHermitian(InvalidState):
    def __init__(self, magnitude):
        super().__init__("hermiticity", magnitude)


class TraceNotOne(InvalidState):
    def __init__(self, magnitude):
        super().__init__("unit trace", magnitude)


class NotPositive(InvalidState):
    def __init__(self, magnitude):
        super().__init__("positivity", magnitude)


class BlochVectorZero(XYCorrError, ValueError):
    """The X-state MIN shortcut needs a nonzero local Bloch vector."""


class QuadratureNoConvergence(XYCorrError, ArithmeticError):
    """Adaptive quadrature hit its depth limit before meeting tolerance."""


class DomainError(XYCorrError, ValueError):
    pass


class GridTooSmall(XYCorrError, ValueError):
    pass


class NonUniformGrid(XYCorrError, ValueError):
    pass


class FlatCurve(XYCorrError):
    """The derivative of a measure curve is numerically zero over the window."""


class NotFound(XYCorrError):
    pass


class SizeTooLarge(XYCorrError, ValueError):
    pass

"""Exception types shared across the package."""


class BvpError(Exception):
    """Base class for all package-specific errors."""


class TransformUndefinedError(BvpError):
    """Coordinate transform is undefined for the given parameters (B1 = 0)."""


class IntegrationError(BvpError):
    """Integration failed; carries the partial trajectory computed so far."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class StiffnessError(IntegrationError):
    """Step size underflowed; the problem is too stiff for the tolerances."""


class MaxStepsExceeded(IntegrationError):
    """Step budget exhausted before reaching the end of the time span."""


class NoCrossingError(BvpError):
    """No section crossing found within the allowed integration time."""


class NoReturnError(BvpError):
    """Trajectory failed to complete a global return loop in time."""


class InsufficientDataError(BvpError):
    """Not enough oscillations or section points to classify."""


class BracketError(BvpError):
    """A scanned interval contained no sign change for the root finder."""


class NotAHopfError(BvpError):
    """Trace-zero point has nonpositive determinant; not a Hopf point."""


class QuadratureError(BvpError):
    """Adaptive quadrature failed to converge to the requested accuracy."""


class InvalidPointError(BvpError):
    """Point does not satisfy the stationarity equations."""

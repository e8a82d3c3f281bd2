"""Exception types raised across the package."""


class GydetError(Exception):
    """Base class for all package errors."""


class ProfileSyntaxError(GydetError, ValueError):
    """Malformed frequency-profile expression or JSON document.

    Attributes
    ----------
    position : int or None
        Character offset of the offending token, when known.
    """

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class ProfileDomainError(GydetError, ValueError):
    """Profile evaluated outside its domain or returned a non-finite value."""


class IntegrationError(GydetError, RuntimeError):
    """The adaptive integrator could not reach the requested accuracy."""


class DegenerateReferenceError(GydetError, ValueError):
    """The constant-frequency reference operator is singular."""


class ZeroModeError(GydetError, RuntimeError):
    """A zero mode makes the requested quantity undefined or unsupported."""


class MarginalZeroModeWarning(UserWarning):
    """The zero-mode boundary residual lies in the marginal band."""


class PeriodicityWarning(UserWarning):
    """The profile does not look periodic over the window."""

"""Exception types raised across the package."""


class StokesRabiError(Exception):
    """Base class for all package errors."""


class InvalidInput(StokesRabiError, ValueError):
    """Non-finite or otherwise unusable numeric input."""


class ClassificationAmbiguous(StokesRabiError):
    """Root-pattern signs are numerically inconsistent.

    ``candidates`` holds the competing pattern names.
    """

    def __init__(self, message, candidates=()):
        super().__init__(message)
        self.candidates = tuple(candidates)


class InfiniteCoupling(StokesRabiError, ValueError):
    """g^2 = 0 was requested; that regime lives in :mod:`stokes_rabi.asymptotics`."""


class DepressedDifferential(StokesRabiError):
    """A zero of the numerator sits on a double pole at +1 or -1."""

    def __init__(self, message, pole=None, value=None):
        super().__init__(message)
        self.pole = pole
        self.value = value


class PoleEvaluation(StokesRabiError, ValueError):
    """Q0 evaluated exactly at a pole."""


class SingularPath(StokesRabiError):
    """An integration segment passes through or too close to a critical point."""


class StepUnderflow(StokesRabiError):
    """The trajectory integrator could not keep the square-root branch."""


class DanglingEdge(StokesRabiError):
    """A traced ray ended away from every known vertex."""


class EmbeddingError(StokesRabiError):
    """Rotation system does not describe a valid sphere embedding."""

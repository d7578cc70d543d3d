"""Exception hierarchy shared by all gammalab modules."""
from __future__ import annotations


class GammaLabError(Exception):
    """Base class for every error raised by gammalab."""


class DomainError(GammaLabError, ValueError):
    """Input lies outside the domain of the operation (branch cut, zero, ...)."""


class PoleError(DomainError):
    """Input is too close to a pole of Gamma.

    ``pole`` is the offending non-positive integer.
    """

    def __init__(self, pole: int, z: complex, distance: float):
        self.pole = pole
        self.z = z
        self.distance = distance
        super().__init__(f"z={z!r} is within {distance:.3g} of the pole {pole}")


class NoSeedError(DomainError):
    """No point on (alpha, inf) where Gamma takes the requested value."""


class TraceError(GammaLabError):
    """Level-curve continuation failed; ``last_x`` is the last accepted abscissa."""

    def __init__(self, message: str, last_x: float):
        self.last_x = last_x
        super().__init__(f"{message} (last good x={last_x!r})")


class ContourError(GammaLabError):
    """The function came too close to zero on a counting contour."""


class CertificationError(GammaLabError):
    """A fiber point could not be certified; ``best`` holds the best Newton iterate."""

    def __init__(self, message: str, best=None):
        self.best = best
        super().__init__(message)


class ResolutionError(GammaLabError):
    """Adaptive subdivision exceeded its depth limit."""


class SamplingError(GammaLabError):
    """A sampling region produced no admissible points."""


class ConditioningError(GammaLabError):
    """Feature matrix too badly scaled for a meaningful rank estimate."""
